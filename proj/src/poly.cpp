#include "volterra/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace volterra {

Poly::Poly(std::vector<double> coef) : coef_(std::move(coef)) {
    if (coef_.empty()) coef_.push_back(0.0);
}

Poly Poly::monomial(int k, double v) {
    std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
    c.back() = v;
    return Poly(std::move(c));
}

int Poly::degree(double rel_tol) const {
    double floor = rel_tol * max_abs_coeff();
    for (std::size_t k = coef_.size(); k-- > 0;)
        if (std::abs(coef_[k]) > floor) return static_cast<int>(k);
    return 0;
}

double Poly::max_abs_coeff() const {
    double m = 0.0;
    for (double c : coef_) m = std::max(m, std::abs(c));
    return m;
}

Poly Poly::derivative() const {
    if (coef_.size() <= 1) return Poly();
    std::vector<double> d(coef_.size() - 1);
    for (std::size_t k = 1; k < coef_.size(); ++k) d[k - 1] = static_cast<double>(k) * coef_[k];
    return Poly(std::move(d));
}

Poly& Poly::drop_trailing(double rel_tol) {
    coef_.resize(static_cast<std::size_t>(degree(rel_tol)) + 1);
    return *this;
}

Poly& Poly::operator+=(const Poly& rhs) {
    if (rhs.coef_.size() > coef_.size()) coef_.resize(rhs.coef_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coef_.size(); ++k) coef_[k] += rhs.coef_[k];
    return *this;
}

Poly& Poly::operator-=(const Poly& rhs) {
    if (rhs.coef_.size() > coef_.size()) coef_.resize(rhs.coef_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coef_.size(); ++k) coef_[k] -= rhs.coef_[k];
    return *this;
}

Poly& Poly::operator*=(double s) {
    for (double& c : coef_) c *= s;
    return *this;
}

Poly operator*(const Poly& lhs, const Poly& rhs) {
    std::vector<double> out(lhs.coef_.size() + rhs.coef_.size() - 1, 0.0);
    for (std::size_t i = 0; i < lhs.coef_.size(); ++i) {
        if (lhs.coef_[i] == 0.0) continue;
        for (std::size_t j = 0; j < rhs.coef_.size(); ++j) out[i + j] += lhs.coef_[i] * rhs.coef_[j];
    }
    return Poly(std::move(out));
}

double cauchy_root_bound(const Poly& p) {
    int n = p.degree();
    if (n == 0) return 0.0;
    double lead = std::abs(p.coeff(n));
    double m = 0.0;
    for (int k = 0; k < n; ++k) m = std::max(m, std::abs(p.coeff(k)) / lead);
    return 1.0 + m;
}

namespace {

// Row-major square scratch matrix for the eigenvalue sweep.
struct Dense {
    int n;
    std::vector<double> v;
    explicit Dense(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * n + j]; }
    double get(int i, int j) const { return v[static_cast<std::size_t>(i) * n + j]; }
};

// Iterative exact-power-of-two row/column norm equilibration (preserves
// eigenvalues exactly in floating point).
void balance(Dense& a) {
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < a.n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < a.n; ++j)
                if (j != i) {
                    c += std::abs(a.get(j, i));
                    r += std::abs(a.get(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0, s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (int j = 0; j < a.n; ++j) a.at(i, j) *= g;
                    for (int j = 0; j < a.n; ++j) a.at(j, i) *= f;
                }
            }
        }
    }
}

// Francis double-shift QR for a real upper Hessenberg matrix, eigenvalues
// only (EISPACK hqr lineage).
void hqr(Dense& a, std::vector<double>& wr, std::vector<double>& wi) {
    const int n = a.n;
    const double eps = std::numeric_limits<double>::epsilon();
    wr.assign(n, 0.0);
    wi.assign(n, 0.0);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a.get(i, j));
    if (anorm == 0.0) return;

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a.get(l - 1, l - 1)) + std::abs(a.get(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a.get(l, l - 1)) <= eps * s) {
                    a.at(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = a.get(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn--] = 0.0;
            } else {
                double y = a.get(nn - 1, nn - 1);
                double w = a.get(nn, nn - 1) * a.get(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + (p >= 0.0 ? std::abs(z) : -std::abs(z));
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn] = z;
                        wi[nn - 1] = -z;
                    }
                    nn -= 2;
                } else {
                    if (its == 60) raise(Errc::root_finding_failure, "QR iteration did not converge");
                    if (its == 10 || its == 20 || its == 30 || its == 40 || its == 50) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a.at(i, i) -= x;
                        double s = std::abs(a.get(nn, nn - 1)) + std::abs(a.get(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a.get(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a.get(m + 1, m) + a.get(m, m + 1);
                        q = a.get(m + 1, m + 1) - z - rr - ss;
                        r = a.get(m + 2, m + 1);
                        double scale = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= scale;
                        q /= scale;
                        r /= scale;
                        if (m == l) break;
                        double u = std::abs(a.get(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) *
                                   (std::abs(a.get(m - 1, m - 1)) + std::abs(z) + std::abs(a.get(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a.at(i, i - 2) = 0.0;
                        if (i != m + 2) a.at(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a.get(k, k - 1);
                            q = a.get(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a.get(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0.0) s = -s;
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a.at(k, k - 1) = -a.get(k, k - 1);
                            } else {
                                a.at(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            double yy = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                double pp = a.get(k, j) + q * a.get(k + 1, j);
                                if (k != nn - 1) {
                                    pp += r * a.get(k + 2, j);
                                    a.at(k + 2, j) -= pp * z;
                                }
                                a.at(k + 1, j) -= pp * yy;
                                a.at(k, j) -= pp * x;
                            }
                            int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                double pp = x * a.get(i, k) + yy * a.get(i, k + 1);
                                if (k != nn - 1) {
                                    pp += z * a.get(i, k + 2);
                                    a.at(i, k + 2) -= pp * r;
                                }
                                a.at(i, k + 1) -= pp * q;
                                a.at(i, k) -= pp;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
}

}  // namespace

std::vector<std::complex<double>> poly_roots(const Poly& p) {
    // Trim against the absolute largest coefficient; a genuinely zero leading
    // coefficient would otherwise poison the companion matrix.
    int n = p.degree(1e-14);
    if (n == 0) return {};
    double lead = p.coeff(n);

    Dense comp(n);
    for (int i = 1; i < n; ++i) comp.at(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp.at(i, n - 1) = -p.coeff(i) / lead;

    balance(comp);
    std::vector<double> wr, wi;
    hqr(comp, wr, wi);

    std::vector<std::complex<double>> roots(n);
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = {wr[i], wi[i]};
    std::sort(roots.begin(), roots.end(), [](const auto& u, const auto& v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    return roots;
}

}  // namespace volterra
