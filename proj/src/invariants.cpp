#include "volterra/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace volterra {

namespace {
using LD = long double;
}

// --- Lax matrix -----------------------------------------------------------------

Matrix lax_matrix(const PeriodicOperator& op) {
    int t = op.period();
    Matrix l(t);
    for (int k = 0; k + 1 < t; ++k) {
        l(k, k + 1) = op.a(k + 1);
        l(k + 1, k) = op.a(k + 1);
    }
    l(0, t - 1) = op.a(0);
    l(t - 1, 0) = op.a(0);
    return l;
}

double lax_spectral_radius(const PeriodicOperator& op) {
    SymmetricEigen eig = jacobi_eigen(lax_matrix(op));
    return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

// --- trace invariants --------------------------------------------------------------

double j_trace(const PeriodicOperator& op, int k) {
    if (k < 0 || k > op.gaps()) raise(Errc::out_of_range, "k = " + std::to_string(k));
    if (k == 0) {
        double s = 0.0;
        for (int i = 0; i < op.period(); ++i) s += std::log(op.c(i));
        return 0.5 * s;
    }
    Matrix l = lax_matrix(op);
    Matrix p = l;
    for (int e = 1; e < 2 * k; ++e) p = matmul(p, l);
    return trace(p) / (2.0 * k);
}

InvariantSet invariant_set(const PeriodicOperator& op) {
    InvariantSet inv;
    int n = op.gaps();
    inv.J.resize(static_cast<std::size_t>(n) + 1);
    inv.J[0] = j_trace(op, 0);
    Matrix l = lax_matrix(op);
    Matrix sq = matmul(l, l);
    Matrix p = sq;
    for (int k = 1; k <= n; ++k) {
        inv.J[static_cast<std::size_t>(k)] = trace(p) / (2.0 * k);
        if (k < n) p = matmul(p, sq);
    }
    return inv;
}

// --- Newton-identity route ------------------------------------------------------------

namespace {

// factorials through 25! fit a long double exactly enough for our sums
LD factorial_ld(int n) {
    LD f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= static_cast<LD>(i);
    return f;
}

void compositions_rec(int part, int remaining, std::vector<int>& mult, LD& acc,
                      const std::vector<LD>& ratios) {
    int n_parts = static_cast<int>(mult.size());
    if (remaining == 0) {
        int total = 0, alt = 0;
        for (int m = 1; m <= n_parts; ++m) {
            total += mult[static_cast<std::size_t>(m - 1)];
            if (m % 2 == 0) alt += mult[static_cast<std::size_t>(m - 1)];
        }
        LD term = factorial_ld(total - 1);
        for (int m = 1; m <= n_parts; ++m) {
            int j = mult[static_cast<std::size_t>(m - 1)];
            term /= factorial_ld(j);
            for (int rep = 0; rep < j; ++rep) term *= ratios[static_cast<std::size_t>(m)];
        }
        acc += (alt % 2 == 0 ? term : -term);
        return;
    }
    if (part > n_parts || part > remaining) return;
    for (int j = 0; part * j <= remaining; ++j) {
        mult[static_cast<std::size_t>(part - 1)] = j;
        compositions_rec(part + 1, remaining - part * j, mult, acc, ratios);
    }
    mult[static_cast<std::size_t>(part - 1)] = 0;
}

}  // namespace

double j_from_i(const DeltaPolynomial& delta, int k) {
    int n = delta.gaps();
    if (k < 1 || k > n) raise(Errc::out_of_range, "k = " + std::to_string(k));
    std::vector<LD> ratios(static_cast<std::size_t>(n) + 1, 0.0L);
    for (int m = 1; m <= n; ++m)
        ratios[static_cast<std::size_t>(m)] =
            static_cast<LD>(delta.I[static_cast<std::size_t>(m)]) / static_cast<LD>(delta.I[0]);
    LD acc = 0.0L;
    std::vector<int> mult(static_cast<std::size_t>(n), 0);
    compositions_rec(1, k, mult, acc, ratios);
    return static_cast<double>(acc);
}

// --- series expansions ---------------------------------------------------------------

SeriesExpansion expand_log_delta(const DeltaPolynomial& delta, int order) {
    int n = delta.gaps();
    if (order < 0) raise(Errc::out_of_range, "order must be nonnegative");
    if (!(delta.I[0] > 0.0)) raise(Errc::invalid_range, "I_0 must be positive");

    // u(x) = sum_{i=1..N} (-1)^i (I_i/I_0) x^i,  ln(1+u) truncated at x^order.
    std::size_t len = static_cast<std::size_t>(order) + 1;
    std::vector<LD> u(len, 0.0L);
    for (int i = 1; i <= n && i <= order; ++i) {
        LD r = static_cast<LD>(delta.I[static_cast<std::size_t>(i)]) / static_cast<LD>(delta.I[0]);
        u[static_cast<std::size_t>(i)] = (i % 2 == 0) ? r : -r;
    }
    std::vector<LD> acc(len, 0.0L), upow(u);
    for (int j = 1; j <= order; ++j) {
        LD w = (j % 2 == 1 ? 1.0L : -1.0L) / static_cast<LD>(j);
        for (std::size_t i = 0; i < len; ++i) acc[i] += w * upow[i];
        if (j < order) {
            std::vector<LD> next(len, 0.0L);
            for (std::size_t a = 1; a < len; ++a) {
                if (upow[a] == 0.0L) continue;
                for (std::size_t b = 1; a + b < len; ++b) next[a + b] += upow[a] * u[b];
            }
            upow = std::move(next);
        }
    }

    SeriesExpansion s;
    s.log_coefficient = 2.0 * n + 1.0;
    s.coeffs.resize(len);
    s.coeffs[0] = std::log(delta.I[0]);
    for (std::size_t k = 1; k < len; ++k) s.coeffs[k] = static_cast<double>(acc[k]);
    return s;
}

// --- P_- sampling and least squares ----------------------------------------------------

namespace {

using CLD = std::complex<LD>;

// g(lambda) = ln rho_-(lambda) + (2N+1) ln lambda is single valued and
// analytic outside the spectral bands (the winding of rho_- around zero is
// exactly cancelled by the lambda power), with the even expansion
// g = sum_k b_k lambda^{-2k} at infinity.  Trapezoidal Cauchy coefficients on
// the circle |lambda| = radius recover b_k with aliasing ~ (R/radius)^{M};
// the relative error on b_k stays flat in k because the noise amplification
// radius^{2k} is matched by the coefficient growth.  A graded least-squares
// fit on the real axis cannot do this: the unmodelled tail biases the high
// coefficients at O(1) once N is large.
struct ContourFit {
    std::vector<LD> b;
    LD diag = 0.0L;  // worst imaginary / odd-frequency residual, relative
};

ContourFit rho_log_coeffs_contour(const Poly& delta_poly, int two_n_plus_1, double radius, int kmax,
                                  int m_points) {
    const LD pi = 3.14159265358979323846264338327950288L;
    std::vector<CLD> g(static_cast<std::size_t>(m_points));
    LD prev_arg = 0.0L;
    LD scale_g = 0.0L;
    for (int j = 0; j < m_points; ++j) {
        LD theta = 2.0L * pi * static_cast<LD>(j) / static_cast<LD>(m_points);
        CLD lam = static_cast<LD>(radius) * CLD(std::cos(theta), std::sin(theta));
        CLD half = delta_poly(lam) / CLD(2.0L);
        CLD w = std::sqrt(half * half - CLD(1.0L));
        if (std::real(std::conj(half) * w) < 0.0L) w = -w;
        CLD rho_big = half + w;
        if (std::abs(rho_big) <= 1.0L)
            raise(Errc::branch_ambiguity, "contour touches the spectral bands");
        CLD f = std::pow(lam, two_n_plus_1) / rho_big;  // rho_- lambda^{2N+1}
        LD mag = std::log(std::abs(f));
        LD arg = std::arg(f);
        if (j > 0) {  // unwrap: F never winds, steps are small
            while (arg - prev_arg > pi) arg -= 2.0L * pi;
            while (arg - prev_arg < -pi) arg += 2.0L * pi;
        }
        prev_arg = arg;
        g[static_cast<std::size_t>(j)] = CLD(mag, arg);
        scale_g = std::max(scale_g, std::abs(g[static_cast<std::size_t>(j)]));
    }
    if (std::abs(prev_arg) > pi)  // must return near the start phase
        raise(Errc::fit_ill_conditioned, "phase failed to close around the contour");

    ContourFit out;
    out.b.resize(static_cast<std::size_t>(kmax) + 1);
    LD rpow = 1.0L;
    for (int k = 0; k <= kmax; ++k) {
        CLD acc(0.0L, 0.0L);
        for (int j = 0; j < m_points; ++j) {
            LD theta = 2.0L * pi * static_cast<LD>(2 * k) * static_cast<LD>(j) /
                       static_cast<LD>(m_points);
            acc += g[static_cast<std::size_t>(j)] * CLD(std::cos(theta), std::sin(theta));
        }
        acc /= static_cast<LD>(m_points);
        out.b[static_cast<std::size_t>(k)] = std::real(acc) * rpow;
        out.diag = std::max(out.diag, std::abs(std::imag(acc)) / std::max(1.0L, scale_g));
        rpow *= static_cast<LD>(radius) * static_cast<LD>(radius);
    }
    return out;
}

}  // namespace

SeriesExpansion expand_log_rho(const PeriodicOperator& op, const DeltaPolynomial& delta, int order,
                               const ToleranceConfig& tol) {
    (void)tol;
    if (order < 0) raise(Errc::out_of_range, "order must be nonnegative");
    int n = delta.gaps();
    double radius = lax_spectral_radius(op);
    int m_points = std::max(256, 16 * (order + 2 * n + 2));

    ContourFit fit1 = rho_log_coeffs_contour(delta.poly(), 2 * n + 1, 1.5 * radius, order, m_points);
    ContourFit fit2 = rho_log_coeffs_contour(delta.poly(), 2 * n + 1, 1.9 * radius, order, m_points);

    SeriesExpansion s;
    s.log_coefficient = -(2.0 * n + 1.0);
    s.coeffs.resize(static_cast<std::size_t>(order) + 1);
    double err = static_cast<double>(std::max(fit1.diag, fit2.diag));
    for (int k = 0; k <= order; ++k) {
        double b1 = static_cast<double>(fit1.b[static_cast<std::size_t>(k)]);
        double b2 = static_cast<double>(fit2.b[static_cast<std::size_t>(k)]);
        s.coeffs[static_cast<std::size_t>(k)] = b1;
        err = std::max(err, std::abs(b1 - b2) / std::max(1.0, std::abs(b1)));
    }
    s.fit_error_estimate = err;
    s.fit_condition = 1.0;  // orthogonal basis on the circle
    return s;
}

double q_form(const DeltaPolynomial& delta, double lam, BracketKind kind, const ToleranceConfig& tol) {
    if (lam == 0.0) raise(Errc::out_of_range, "lambda = 0 is a pole of Q");
    const Poly& p = delta.poly();
    LD half = p(static_cast<LD>(lam)) / 2.0L;
    LD disc = half * half - 1.0L;
    if (disc <= 0.0L) {
        double dist = static_cast<double>(std::abs(disc)) /
                      std::max(std::abs(static_cast<double>(half) * p.derivative()(lam)), 1e-300);
        if (dist < tol.sep_tol) raise(Errc::branch_ambiguity, "lambda within sep_tol of a branch point");
        raise(Errc::branch_ambiguity, "lambda inside a spectral band: rho is unimodular");
    }
    // |rho_-| on either side: the modulus-small root is sign(Delta)/( |Delta|/2 + sqrt(disc) ).
    LD ln_abs_rho = -std::log(std::abs(half) + std::sqrt(disc));
    int m = momentum_exponent(kind);
    LD denom = lam;
    for (int i = 1; i < m; ++i) denom *= lam;
    return static_cast<double>(2.0L * ln_abs_rho / denom);
}

ExpansionCheck check_hamiltonian_expansion(const PeriodicOperator& op, BracketKind kind,
                                           const ToleranceConfig& tol) {
    (void)tol;
    int n = op.gaps();
    DeltaPolynomial delta = delta_combinatorial(op);
    InvariantSet inv = invariant_set(op);
    double radius = lax_spectral_radius(op);

    // (lambda^m / 2) Q = ln rho_-: extracting the even coefficients of
    // ln rho_- + (2N+1) ln lambda gives the lambda^{-2k-1} coefficients of Q
    // as 2 b_idx once the annulator-dependent terms are removed -- the
    // (2N+1) ln lambda / lambda^m piece for both brackets, plus the
    // b_0 / lambda^m piece for the quadratic one (J_0 = -ln I_0 is a function
    // of its annulator I_0).
    int m_points = std::max(256, 48 * (n + 1));
    ContourFit fit = rho_log_coeffs_contour(delta.poly(), 2 * n + 1, 1.5 * radius, n, m_points);
    ContourFit check = rho_log_coeffs_contour(delta.poly(), 2 * n + 1, 1.9 * radius, n, m_points);

    ExpansionCheck out;
    out.fitted.resize(static_cast<std::size_t>(n));
    out.expected.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        int idx = (kind == BracketKind::quadratic) ? k : k - 1;
        double fitted = 2.0 * static_cast<double>(fit.b[static_cast<std::size_t>(idx)]);
        double expected = 2.0 * inv.J[static_cast<std::size_t>(idx)];
        out.fitted[static_cast<std::size_t>(k - 1)] = fitted;
        out.expected[static_cast<std::size_t>(k - 1)] = expected;
        out.max_rel_error = std::max(out.max_rel_error,
                                     std::abs(fitted - expected) / std::max(1e-30, std::abs(expected)));
        out.fit_error_estimate = std::max(
            out.fit_error_estimate,
            std::abs(static_cast<double>(fit.b[static_cast<std::size_t>(idx)] -
                                         check.b[static_cast<std::size_t>(idx)])) /
                std::max(1.0, std::abs(expected)));
    }
    return out;
}

namespace {

double branch_radius(const DeltaPolynomial& delta) {
    Poly plus = delta.poly();
    plus += Poly::constant(-2.0);
    double radius = 0.0;
    for (const auto& r : poly_roots(plus)) radius = std::max(radius, std::abs(r));
    return radius == 0.0 ? 1.0 : radius;
}

}  // namespace

std::vector<double> default_lambda_samples(const DeltaPolynomial& delta, int count) {
    double radius = branch_radius(delta);
    std::vector<double> s(static_cast<std::size_t>(count));
    double lam = 1.08 * radius;
    double ratio = std::pow(2.0, 1.0 / std::max(count - 1, 1));
    for (int i = 0; i < count; ++i) {
        s[static_cast<std::size_t>(i)] = lam;
        lam *= ratio;
    }
    return s;
}

namespace {

LD q_form_ld(const std::vector<double>& coeff_i, double lam, int mexp) {
    DeltaPolynomial d(coeff_i);
    LD half = d.poly()(static_cast<LD>(lam)) / 2.0L;
    LD disc = half * half - 1.0L;
    if (disc <= 0.0L) raise(Errc::near_branch_point, "sample fell inside a band under perturbation");
    LD ln_abs_rho = -std::log(std::abs(half) + std::sqrt(disc));
    LD denom = lam;
    for (int i = 1; i < mexp; ++i) denom *= lam;
    return 2.0L * ln_abs_rho / denom;
}

CLD rho_small_at(const Poly& p, CLD lam) {
    CLD half = p(lam) / CLD(2.0L);
    CLD w = std::sqrt(half * half - CLD(1.0L));
    if (std::real(std::conj(half) * w) < 0.0L) w = -w;
    return CLD(1.0L) / (half + w);
}

// one-sided Jacobi in long double: condition of a column-normalized matrix
LD condition_ld(std::vector<std::vector<LD>> a) {
    int m = static_cast<int>(a.size());
    int n = static_cast<int>(a[0].size());
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                LD app = 0, aqq = 0, apq = 0;
                for (int i = 0; i < m; ++i) {
                    app += a[i][p] * a[i][p];
                    aqq += a[i][q] * a[i][q];
                    apq += a[i][p] * a[i][q];
                }
                if (std::abs(apq) < 1e-28L * std::sqrt(app * aqq)) continue;
                rotated = true;
                LD tau = (aqq - app) / (2.0L * apq);
                LD t = (tau >= 0 ? 1.0L : -1.0L) / (std::abs(tau) + std::sqrt(1.0L + tau * tau));
                LD c = 1.0L / std::sqrt(1.0L + t * t), s = t * c;
                for (int i = 0; i < m; ++i) {
                    LD x = a[i][p], y = a[i][q];
                    a[i][p] = c * x - s * y;
                    a[i][q] = s * x + c * y;
                }
            }
        if (!rotated) break;
    }
    LD smin = std::numeric_limits<LD>::max(), smax = 0;
    for (int q = 0; q < n; ++q) {
        LD s = 0;
        for (int i = 0; i < m; ++i) s += a[i][q] * a[i][q];
        s = std::sqrt(s);
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    if (smin == 0.0L) return std::numeric_limits<LD>::max();
    return smax / smin;
}

}  // namespace

DifferentialCheck check_differential_basis(const DeltaPolynomial& delta, BracketKind kind,
                                           const std::vector<double>& lam_samples,
                                           const ToleranceConfig& tol) {
    int n = delta.gaps();
    int mexp = momentum_exponent(kind);
    // tangent indices on the annulator level surface
    int idx_lo = (kind == BracketKind::quadratic) ? 1 : 0;
    int idx_hi = (kind == BracketKind::quadratic) ? n : n - 1;

    const Poly& p = delta.poly();
    DifferentialCheck out;
    out.per_index_error.assign(static_cast<std::size_t>(idx_hi - idx_lo + 1), 0.0);

    auto fd_derivative = [&](int m, double lam) {
        // step sized so the discriminant moves by ~1e-3 of itself at this
        // lambda: uniform relative FD noise across indices, no nonlinearity
        double sens = 1.0;
        for (int e = 0; e < 2 * n + 1 - 2 * m; ++e) sens *= lam;
        double h = 1e-3 * std::abs(static_cast<double>(p(static_cast<LD>(lam)))) / sens;
        h = std::max(h, tol.fd_step * tol.fd_step * std::max(1.0, std::abs(delta.I[static_cast<std::size_t>(m)])));
        auto eval = [&](double step) {
            std::vector<double> ip = delta.I, im = delta.I;
            ip[static_cast<std::size_t>(m)] += step;
            im[static_cast<std::size_t>(m)] -= step;
            return (q_form_ld(ip, lam, mexp) - q_form_ld(im, lam, mexp)) / (2.0L * static_cast<LD>(step));
        };
        LD d1 = eval(h), d2 = eval(h / 2.0);
        return static_cast<double>((4.0L * d2 - d1) / 3.0L);  // Richardson
    };

    auto target = [&](int m, double lam) {
        LD half = p(static_cast<LD>(lam)) / 2.0L;
        LD disc = half * half - 1.0L;
        if (disc <= 0.0L) raise(Errc::near_branch_point, "sample too close to a branch point");
        LD root = std::sqrt(disc);
        // y on the P_- sheet: rho_small - Delta/2 = -sign(Delta) sqrt(disc)
        LD y = (half >= 0.0L) ? -root : root;
        int expo = 2 * n + 1 - 2 * m - mexp;  // even by construction (sigma-invariance)
        LD pw = 1.0L;
        for (int i = 0; i < std::abs(expo); ++i) pw *= static_cast<LD>(lam);
        if (expo < 0) pw = 1.0L / pw;
        double sign = (m % 2 == 0) ? 1.0 : -1.0;
        return static_cast<double>(sign * pw / y);
    };

    for (double lam : lam_samples) {
        if (!(lam > 0.0)) raise(Errc::out_of_range, "lambda samples must be positive");
        for (int m = idx_lo; m <= idx_hi; ++m) {
            double d = fd_derivative(m, lam);
            double t = target(m, lam);
            double rel = std::abs(d - t) / std::max(1e-30, std::abs(t));
            std::size_t slot = static_cast<std::size_t>(m - idx_lo);
            out.per_index_error[slot] = std::max(out.per_index_error[slot], rel);
            out.max_rel_error = std::max(out.max_rel_error, rel);
        }
    }

    // Full-rank test of the N differentials.  Sample points live on the
    // complex curve: on a circle above the branch radius the lambda powers
    // act like Fourier modes, so the rank question is not drowned by the
    // grading a real-axis Vandermonde would impose.  The derivative of
    // ln rho under an I-step is taken through the ratio of the two
    // perturbed multipliers; any fixed log branch cancels.
    double rank_radius = 1.35 * branch_radius(delta);
    auto fd_complex = [&](int m, CLD lam) {
        double sens = std::pow(std::abs(lam), 2 * n + 1 - 2 * m);
        double h = 1e-3 * std::abs(p(lam)) / sens;
        auto pair_log = [&](double step) {
            std::vector<double> ip = delta.I, im = delta.I;
            ip[static_cast<std::size_t>(m)] += step;
            im[static_cast<std::size_t>(m)] -= step;
            CLD r_p = rho_small_at(DeltaPolynomial(ip).poly(), lam);
            CLD r_m = rho_small_at(DeltaPolynomial(im).poly(), lam);
            return std::log(r_p / r_m) / CLD(2.0L * static_cast<LD>(step));
        };
        CLD d1 = pair_log(h), d2 = pair_log(h / 2.0);
        CLD dln = (CLD(4.0L) * d2 - d1) / CLD(3.0L);
        CLD denom = lam;
        for (int i = 1; i < mexp; ++i) denom *= lam;
        return CLD(2.0L) * dln / denom;
    };
    // stack real and imaginary parts: independence over real coefficients
    std::vector<std::vector<LD>> d(static_cast<std::size_t>(2 * n),
                                   std::vector<LD>(static_cast<std::size_t>(n)));
    for (int s = 0; s < n; ++s) {
        double theta = 0.3 + 2.2 * static_cast<double>(s) / std::max(n - 1, 1);
        CLD lam = CLD(static_cast<LD>(rank_radius)) *
                  CLD(std::cos(static_cast<LD>(theta)), std::sin(static_cast<LD>(theta)));
        for (int m = idx_lo; m <= idx_hi; ++m) {
            CLD v = fd_complex(m, lam);
            d[static_cast<std::size_t>(s)][static_cast<std::size_t>(m - idx_lo)] = std::real(v);
            d[static_cast<std::size_t>(n + s)][static_cast<std::size_t>(m - idx_lo)] = std::imag(v);
        }
    }
    for (int m = 0; m < n; ++m) {
        LD mx = 0;
        for (int s = 0; s < 2 * n; ++s)
            mx = std::max(mx, std::abs(d[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)]));
        if (mx == 0.0L) mx = 1.0L;
        for (int s = 0; s < 2 * n; ++s) d[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)] /= mx;
    }
    out.sample_condition = static_cast<double>(condition_ld(std::move(d)));
    return out;
}

}  // namespace volterra
