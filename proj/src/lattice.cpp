#include "volterra/lattice.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace volterra {

PeriodicOperator::PeriodicOperator(std::vector<double> weights) : c_(std::move(weights)) {
    if (c_.size() < 3) raise(Errc::too_short, "period must be at least 3, got " + std::to_string(c_.size()));
    if (c_.size() % 2 == 0) raise(Errc::even_period, "period must be odd, got " + std::to_string(c_.size()));
    a_.resize(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (!(c_[i] > 0.0) || !std::isfinite(c_[i]))
            raise(Errc::non_positive_weight, "c[" + std::to_string(i) + "] = " + std::to_string(c_[i]));
        a_[i] = std::sqrt(c_[i]);
    }
}

void ToleranceConfig::validate() const {
    if (!(eq_tol > 0.0 && fd_step > 0.0 && sep_tol > 0.0))
        raise(Errc::invalid_range, "tolerances must be strictly positive");
    if (!(fd_step * fd_step > std::numeric_limits<double>::epsilon()))
        raise(Errc::invalid_range, "fd_step^2 must exceed machine epsilon");
}

PeriodicOperator new_operator(std::vector<double> weights) { return PeriodicOperator(std::move(weights)); }

PeriodicOperator random_operator(int n_gaps, std::uint64_t seed, double lo, double hi) {
    if (n_gaps < 1) raise(Errc::invalid_range, "need n_gaps >= 1");
    if (!(lo > 0.0) || !(hi >= lo)) raise(Errc::invalid_range, "need 0 < lo <= hi");
    std::mt19937_64 rng(seed);
    std::vector<double> c(2 * static_cast<std::size_t>(n_gaps) + 1);
    for (double& w : c) {
        // 53-bit mantissa draw; uniform_real_distribution is implementation-defined.
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        w = lo + (hi - lo) * u;
    }
    return PeriodicOperator(std::move(c));
}

PeriodicOperator perturb(const PeriodicOperator& op, int i, double eps) {
    std::vector<double> c = op.weights();
    double& slot = c[op.mod(i)];
    slot += eps;
    if (!(slot > 0.0))
        raise(Errc::non_positive_weight,
              "perturbation drives c[" + std::to_string(op.mod(i)) + "] to " + std::to_string(slot));
    return PeriodicOperator(std::move(c));
}

}  // namespace volterra
