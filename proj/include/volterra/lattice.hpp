#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

// Weights c_i > 0 of a zero-diagonal second-order difference operator with
// odd period T = 2N+1, together with a_i = sqrt(c_i).  All index arithmetic
// is cyclic mod T; the accessors accept any integer index.
class PeriodicOperator {
public:
    explicit PeriodicOperator(std::vector<double> weights);

    int period() const { return static_cast<int>(c_.size()); }
    // N with T = 2N+1: the number of spectral gaps / action variables.
    int gaps() const { return (period() - 1) / 2; }

    int mod(int i) const {
        int t = period();
        int r = i % t;
        return r < 0 ? r + t : r;
    }

    double c(int i) const { return c_[mod(i)]; }
    double a(int i) const { return a_[mod(i)]; }
    const std::vector<double>& weights() const { return c_; }

    bool operator==(const PeriodicOperator& other) const { return c_ == other.c_; }

private:
    std::vector<double> c_;
    std::vector<double> a_;
};

struct ToleranceConfig {
    double eq_tol = 1e-9;   // relative tolerance for identity checks
    double fd_step = 1e-6;  // base finite-difference step
    double sep_tol = 1e-8;  // minimal root separation declaring nonsingularity

    void validate() const;
};

PeriodicOperator new_operator(std::vector<double> weights);

// Deterministic: identical (n_gaps, seed, lo, hi) reproduce the operator
// bit for bit on any platform (mt19937_64 with an explicit 53-bit scaling).
PeriodicOperator random_operator(int n_gaps, std::uint64_t seed, double lo, double hi);

// Copy with c_i replaced by c_i + eps; the original is untouched.
PeriodicOperator perturb(const PeriodicOperator& op, int i, double eps);

}  // namespace volterra
