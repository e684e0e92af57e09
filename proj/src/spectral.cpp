#include "volterra/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace volterra {

namespace {
constexpr double kTiny = 1e-300;
}

// --- PolyMat2 ----------------------------------------------------------------

PolyMat2 PolyMat2::identity() {
    PolyMat2 m;
    m.m11 = Poly::constant(1.0);
    m.m12 = Poly::constant(0.0);
    m.m21 = Poly::constant(0.0);
    m.m22 = Poly::constant(1.0);
    return m;
}

PolyMat2 operator*(const PolyMat2& lhs, const PolyMat2& rhs) {
    PolyMat2 out;
    out.m11 = lhs.m11 * rhs.m11 + lhs.m12 * rhs.m21;
    out.m12 = lhs.m11 * rhs.m12 + lhs.m12 * rhs.m22;
    out.m21 = lhs.m21 * rhs.m11 + lhs.m22 * rhs.m21;
    out.m22 = lhs.m21 * rhs.m12 + lhs.m22 * rhs.m22;
    return out;
}

// --- DeltaPolynomial ----------------------------------------------------------

DeltaPolynomial::DeltaPolynomial(std::vector<double> coeffs) : I(std::move(coeffs)) {
    if (I.size() < 2) raise(Errc::too_short, "need at least I_0, I_1");
    int n = gaps();
    std::vector<double> c(static_cast<std::size_t>(2 * n + 2), 0.0);
    double sign = 1.0;
    for (int i = 0; i <= n; ++i) {
        c[static_cast<std::size_t>(2 * n + 1 - 2 * i)] = sign * I[static_cast<std::size_t>(i)];
        sign = -sign;
    }
    poly_ = Poly(std::move(c));
}

// --- transfer / monodromy ------------------------------------------------------

PolyMat2 transfer_step(const PeriodicOperator& op, int n) {
    PolyMat2 a;
    double an1 = op.a(n + 1);
    a.m11 = Poly({0.0, 1.0 / an1});
    a.m12 = Poly::constant(-op.a(n) / an1);
    a.m21 = Poly::constant(1.0);
    a.m22 = Poly::constant(0.0);
    return a;
}

MonodromyMatrix monodromy(const PeriodicOperator& op) {
    PolyMat2 m = PolyMat2::identity();
    for (int n = 0; n < op.period(); ++n) m = transfer_step(op, n) * m;
    return MonodromyMatrix(std::move(m));
}

DeltaPolynomial delta_from_monodromy(const PeriodicOperator& op, const ToleranceConfig& tol) {
    MonodromyMatrix m = monodromy(op);
    const Poly& tr = m.trace_poly();
    int n = op.gaps();
    double scale = tr.max_abs_coeff();
    for (int e = 0; e <= 2 * n; e += 2) {
        if (std::abs(tr.coeff(e)) > tol.eq_tol * scale)
            raise(Errc::parity_violation,
                  "even-power coefficient lambda^" + std::to_string(e) + " = " + std::to_string(tr.coeff(e)));
    }
    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1);
    double sign = 1.0;
    for (int i = 0; i <= n; ++i) {
        coeffs[static_cast<std::size_t>(i)] = sign * tr.coeff(2 * n + 1 - 2 * i);
        sign = -sign;
    }
    return DeltaPolynomial(std::move(coeffs));
}

// --- totally disconnected subsets ----------------------------------------------

namespace {
void enumerate_rec(int period, int remaining, int next, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    // If the subset starts at 0, index period-1 is cyclically adjacent to it.
    int last = period - 1;
    if (!current.empty() && current.front() == 0) last = period - 2;
    for (int v = next; v + 2 * (remaining - 1) <= last; ++v) {
        current.push_back(v);
        enumerate_rec(period, remaining - 1, v + 2, current, out);
        current.pop_back();
    }
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace

std::vector<std::vector<int>> enumerate_totally_disconnected(int period, int size) {
    if (period < 3) raise(Errc::too_short, "period must be at least 3");
    int n = (period - 1) / 2;
    if (size < 0 || size > n)
        raise(Errc::out_of_range, "subset size " + std::to_string(size) + " outside [0, " + std::to_string(n) + "]");
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    if (size == 0) {
        out.emplace_back();
        return out;
    }
    enumerate_rec(period, size, 0, current, out);
    return out;
}

long long totally_disconnected_count(int period, int size) {
    if (size == 0) return 1;
    return period * binomial(period - size, size) / (period - size);
}

DeltaPolynomial delta_combinatorial(const PeriodicOperator& op) {
    int t = op.period(), n = op.gaps();
    double prod_a = 1.0;
    for (int i = 0; i < t; ++i) prod_a *= op.a(i);
    double i0 = 1.0 / prod_a;

    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1);
    coeffs[0] = i0;
    for (int i = 1; i <= n; ++i) {
        double sum = 0.0;
        for (const auto& subset : enumerate_totally_disconnected(t, i)) {
            double prod = 1.0;
            for (int j : subset) prod *= op.c(j);
            sum += prod;
        }
        coeffs[static_cast<std::size_t>(i)] = i0 * sum;
    }
    return DeltaPolynomial(std::move(coeffs));
}

double i_n_closed_form(const PeriodicOperator& op) {
    int t = op.period(), n = op.gaps();
    double prod_a = 1.0;
    for (int i = 0; i < t; ++i) prod_a *= op.a(i);
    double sum = 0.0;
    for (int k = 0; k < t; ++k) {
        double prod = 1.0;
        for (int j = 0; j < n; ++j) prod *= op.c(k + 2 * j);
        sum += prod;
    }
    return sum / prod_a;
}

// --- spectral curve --------------------------------------------------------------

double SpectralCurve::max_branch_modulus() const {
    double m = 0.0;
    for (const auto& z : branch_plus) m = std::max(m, std::abs(z));
    for (const auto& z : branch_minus) m = std::max(m, std::abs(z));
    return m;
}

namespace {

// A cluster of computed roots at distance ~sqrt(eps) is all double precision
// can show for a true multiple root.  Certify by locating the nearby critical
// point z* (simple root of p', full precision) and testing p(z*) against the
// evaluation roundoff scale.
bool certified_multiple_root(const Poly& p, Complex z0) {
    Poly dp = p.derivative();
    Poly ddp = dp.derivative();
    Complex z = z0;
    for (int it = 0; it < 60; ++it) {
        Complex d1 = dp(z), d2 = ddp(z);
        if (std::abs(d2) < kTiny) return false;
        Complex step = d1 / d2;
        z -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(z - z0) > 1e-3 * (1.0 + std::abs(z0))) return false;  // wandered off the cluster
    double scale = 0.0, pw = 1.0;
    for (int k = 0; k <= p.degree(); ++k) {
        scale += std::abs(p.coeff(k)) * pw;
        pw *= std::abs(z);
    }
    double eps = std::numeric_limits<double>::epsilon();
    return std::abs(p(z)) <= 64.0 * (p.degree() + 1) * eps * scale;
}

}  // namespace

SpectralCurve spectral_curve(const DeltaPolynomial& delta, const ToleranceConfig& tol) {
    SpectralCurve curve;
    curve.n_gaps = delta.gaps();
    Poly plus = delta.poly();
    plus += Poly::constant(-2.0);
    Poly minus = delta.poly();
    minus += Poly::constant(2.0);
    curve.branch_plus = poly_roots(plus);
    curve.branch_minus = poly_roots(minus);

    std::vector<Complex> all(curve.branch_plus);
    all.insert(all.end(), curve.branch_minus.begin(), curve.branch_minus.end());

    curve.nonsingular = true;
    double radius = curve.max_branch_modulus();
    double cluster = std::max(tol.sep_tol, 1e-6 * (1.0 + radius));
    for (std::size_t i = 0; i < all.size() && curve.nonsingular; ++i)
        for (std::size_t j = i + 1; j < all.size() && curve.nonsingular; ++j) {
            double dist = std::abs(all[i] - all[j]);
            if (dist <= tol.sep_tol) {
                curve.nonsingular = false;
            } else if (dist <= cluster) {
                // same-family close pair: worth the certificate
                bool same_family = (i < curve.branch_plus.size()) == (j < curve.branch_plus.size());
                if (same_family) {
                    const Poly& fam = (i < curve.branch_plus.size()) ? plus : minus;
                    if (certified_multiple_root(fam, 0.5 * (all[i] + all[j]))) curve.nonsingular = false;
                }
            }
        }
    return curve;
}

// --- Dirichlet spectrum -----------------------------------------------------------

Matrix dirichlet_matrix(const PeriodicOperator& op) {
    int n = op.period() - 1;
    Matrix b(n);
    for (int j = 0; j + 1 < n; ++j) {
        b(j, j + 1) = op.a(j + 2);
        b(j + 1, j) = op.a(j + 2);
    }
    return b;
}

SymmetricEigen dirichlet_eigen(const PeriodicOperator& op) { return jacobi_eigen(dirichlet_matrix(op)); }

DivisorData dirichlet_spectrum(const PeriodicOperator& op, const ToleranceConfig& tol) {
    SymmetricEigen eig = dirichlet_eigen(op);
    int m = static_cast<int>(eig.values.size());  // 2N
    int n = op.gaps();
    double scale = std::max(1.0, std::max(std::abs(eig.values.front()), std::abs(eig.values.back())));

    for (int k = 0; k + 1 < m; ++k)
        if (eig.values[k + 1] - eig.values[k] < tol.sep_tol * scale)
            raise(Errc::degenerate_spectrum, "Dirichlet eigenvalues " + std::to_string(k) + "," +
                                                 std::to_string(k + 1) + " within sep_tol");
    for (int k = 0; k < m; ++k)
        if (std::abs(eig.values[k] + eig.values[m - 1 - k]) > tol.eq_tol * scale)
            raise(Errc::parity_violation, "Dirichlet spectrum not symmetric under negation");

    DivisorData d;
    d.lambda.assign(eig.values.begin() + n, eig.values.end());
    return d;
}

// --- Floquet multipliers ------------------------------------------------------------

Complex floquet_rho(const DeltaPolynomial& delta, Complex lam, int sheet, const ToleranceConfig& tol,
                    bool require_distinct_sheets) {
    const Poly& p = delta.poly();
    Complex half = p(lam) / 2.0;
    Complex disc = half * half - 1.0;
    Complex w = std::sqrt(disc);
    // orient w so that half + w is the larger root in modulus
    if (std::real(std::conj(half) * w) < 0.0) w = -w;
    Complex rho_big = half + w;
    if (std::abs(rho_big) < kTiny) rho_big = half;  // only when half ~ 0 and disc ~ -1
    Complex rho_small = 1.0 / rho_big;

    double gap = std::abs(rho_big) - 1.0;
    if (gap < 1e-9 * (1.0 + std::abs(rho_big))) {
        // unimodular multipliers: on a spectral band or at a branch point
        Complex ddisc = half * Complex(p.derivative()(lam));
        double dist_est = std::abs(disc) / std::max(std::abs(ddisc), kTiny);
        if (dist_est < tol.sep_tol) {
            if (require_distinct_sheets)
                raise(Errc::branch_ambiguity, "lambda within sep_tol of a branch point");
            return rho_big;  // both sheets coincide at the branch point
        }
        // Split the sheets by the upper half plane limit.
        Complex nudged = lam + Complex(0.0, 1e-7 * (1.0 + std::abs(lam)));
        Complex nh = p(nudged) / 2.0;
        Complex nw = std::sqrt(nh * nh - 1.0);
        if (std::real(std::conj(nh) * nw) < 0.0) nw = -nw;
        Complex nbig = nh + nw;
        bool big_matches = std::abs(rho_big - nbig) < std::abs(rho_small - nbig);
        Complex up_big = big_matches ? rho_big : rho_small;
        Complex up_small = big_matches ? rho_small : rho_big;
        return sheet > 0 ? up_big : up_small;
    }
    return sheet > 0 ? rho_big : rho_small;
}

Complex curve_y(const DeltaPolynomial& delta, Complex lam, int sheet, const ToleranceConfig& tol) {
    return floquet_rho(delta, lam, sheet, tol) - delta.poly()(lam) / 2.0;
}

DivisorData resolve_divisor_sheets(const PeriodicOperator& op, const DeltaPolynomial& delta,
                                   const DivisorData& dirichlet, const ToleranceConfig& tol) {
    DivisorData out = dirichlet;
    out.rho.resize(out.lambda.size());
    out.sheet.resize(out.lambda.size());

    for (std::size_t k = 0; k < out.lambda.size(); ++k) {
        double lam = out.lambda[k];
        Mat2<double> m = monodromy_at(op, lam);
        double mat_scale =
            std::max({std::abs(m.m11), std::abs(m.m12), std::abs(m.m21), std::abs(m.m22), 1.0});
        double rho_cand = m.m22;

        if (std::abs(std::abs(rho_cand) - 1.0) < tol.sep_tol)
            raise(Errc::branch_ambiguity,
                  "divisor point " + std::to_string(lam) + " sits at a branch point");

        // The Dirichlet-compatible eigenvector of M is (0,1): residual is
        // |(m12, m22 - rho)|, and m12(lambda_k) ~ 0 by construction.
        int sheet = std::abs(rho_cand) > 1.0 ? 1 : -1;
        Complex rho_matched = floquet_rho(delta, Complex(lam, 0.0), sheet, tol, true);
        double residual = std::hypot(m.m12, m.m22 - std::real(rho_matched)) / mat_scale;
        if (residual > 1e3 * tol.eq_tol)
            raise(Errc::branch_ambiguity, "no Floquet multiplier matches the Dirichlet eigenvector at lambda = " +
                                              std::to_string(lam));

        out.rho[k] = rho_cand;
        out.sheet[k] = sheet;
    }
    return out;
}

std::vector<Complex> bloch_function(const PeriodicOperator& op, const DeltaPolynomial& delta, Complex lam,
                                    int sheet, int n_max, const ToleranceConfig& tol) {
    using CLD = std::complex<long double>;
    Complex rho_d = floquet_rho(delta, lam, sheet, tol, true);  // sheet decision + pole guards

    // long double internals: the recursion's condition number grows with the
    // period and eats the quasi-periodicity budget in double at T = 21
    CLD lam_ld(lam.real(), lam.imag());
    Mat2<CLD> m = monodromy_at(op, lam_ld);
    long double mat_scale = std::max(
        {std::abs(m.m11), std::abs(m.m12), std::abs(m.m21), std::abs(m.m22), 1.0L});
    if (std::abs(m.m12) < 1e-10L * mat_scale)
        raise(Errc::pole_hit, "lambda is (near) a Dirichlet eigenvalue: psi_1 diverges");

    // refine rho on the selected sheet
    CLD half = CLD(delta.poly()(lam_ld)) / CLD(2.0L);
    CLD w = std::sqrt(half * half - CLD(1.0L));
    if (std::real(std::conj(half) * w) < 0.0L) w = -w;
    CLD big = half + w;
    CLD cand1 = big, cand2 = CLD(1.0L) / big;
    CLD rho_d_ld(rho_d.real(), rho_d.imag());
    CLD rho = (std::abs(cand1 - rho_d_ld) < std::abs(cand2 - rho_d_ld)) ? cand1 : cand2;

    std::vector<Complex> psi(static_cast<std::size_t>(n_max) + 1);
    CLD prev = (rho - m.m11) / m.m12;  // psi_{-1} from the rho-eigenvector
    CLD cur(1.0L, 0.0L);
    psi[0] = Complex(1.0, 0.0);
    for (int n = 0; n < n_max; ++n) {
        CLD next = (lam_ld * cur - CLD(static_cast<long double>(op.a(n))) * prev) /
                   CLD(static_cast<long double>(op.a(n + 1)));
        psi[static_cast<std::size_t>(n) + 1] =
            Complex(static_cast<double>(next.real()), static_cast<double>(next.imag()));
        prev = cur;
        cur = next;
    }
    return psi;
}

}  // namespace volterra
