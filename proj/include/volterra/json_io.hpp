#pragma once

#include <string>

#include "volterra/lattice.hpp"

namespace volterra {

// Operator file schema: {"T": <int>, "c": [<floats>]}.  Loading rejects
// files where T disagrees with the array length.
PeriodicOperator load_operator(const std::string& path);
void save_operator(const PeriodicOperator& op, const std::string& path);

// %.17g: lossless double round trip.
std::string format_double(double v);

}  // namespace volterra
