#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

// Failure taxonomy. Input errors mean the caller handed us bad data;
// numeric errors mean the computation hit a condition (degeneracy, branch
// collision, step limit) that downstream consumers must not ignore.
enum class Errc {
    // input
    even_period,
    too_short,
    non_positive_weight,
    invalid_range,
    out_of_range,
    length_mismatch,
    bad_file,
    // numeric
    parity_violation,
    root_finding_failure,
    degenerate_spectrum,
    singular_curve,
    branch_ambiguity,
    pole_hit,
    fit_ill_conditioned,
    near_branch_point,
    sheet_flip,
    canonicity_failure,
    positivity_loss,
    step_limit_exceeded,
};

const char* errc_name(Errc code);
bool is_input_error(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace volterra
