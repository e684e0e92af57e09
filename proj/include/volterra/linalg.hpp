#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

// Row-major square matrix; sizes here never exceed a few dozen.
struct Matrix {
    int n = 0;
    std::vector<double> v;

    Matrix() = default;
    explicit Matrix(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * n + j]; }

    static Matrix identity(int n);
};

Matrix matmul(const Matrix& a, const Matrix& b);
double trace(const Matrix& a);

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k], orthonormal
};

// Cyclic Jacobi rotations; plenty accurate at these sizes.
SymmetricEigen jacobi_eigen(Matrix a);

// Values-only variant in any floating type (long double for the divisor
// momentum pipeline, where eigenvalue noise gets amplified near branch
// points).  `a` is row-major n x n, overwritten.  Returns ascending values.
template <class S>
std::vector<S> jacobi_values(std::vector<S> a, int n) {
    auto at = [&](int i, int j) -> S& { return a[static_cast<std::size_t>(i) * n + j]; };
    S scale = S(0);
    for (const S& v : a) scale = std::max(scale, std::abs(v));
    const S stop = (scale == S(0) ? S(1) : scale) * S(n) * S(1e-19L);
    for (int sweep = 0; sweep < 100; ++sweep) {
        S off = S(0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (std::sqrt(S(2) * off) <= stop) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                S apq = at(p, q);
                if (std::abs(apq) <= stop / S(n * n)) continue;
                S theta = (at(q, q) - at(p, p)) / (S(2) * apq);
                S t = (theta >= S(0) ? S(1) : S(-1)) /
                      (std::abs(theta) + std::sqrt(theta * theta + S(1)));
                S c = S(1) / std::sqrt(t * t + S(1));
                S s = t * c;
                for (int k = 0; k < n; ++k) {
                    S akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    S apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<S> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(values.begin(), values.end());
    return values;
}

// 2-norm condition number estimate of a general square matrix via the
// symmetric eigenvalues of A^T A.
double condition_number(const Matrix& a);

}  // namespace volterra
