#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volterra/lattice.hpp"
#include "volterra/report.hpp"

namespace volterra {

enum class Suite { spectral, poisson, flows, theorem, all };

Suite suite_from_name(const std::string& name);

// Runs the named property checks on one operator with the acceptance
// tolerances pinned in code.  `tolerance_scale` multiplies every check
// tolerance (CLI --tol).  Deterministic given (op, seed).
std::vector<CheckReport> run_suite(const PeriodicOperator& op, Suite suite,
                                   std::uint64_t seed = 12345, double tolerance_scale = 1.0,
                                   const ToleranceConfig& tol = {});

}  // namespace volterra
