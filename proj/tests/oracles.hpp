// SPDX-License-Identifier: Apache-2.0
//
// Reference computations used by the tests. They share no code with the
// library: plain std::vector storage, textbook algorithms.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

inline Mat transpose(const Mat& a) {
    Mat t = zeros(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
    return t;
}

inline Mat mul(const Mat& a, const Mat& b) {
    Mat c = zeros(a.size(), b[0].size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

/// Gauss-Jordan elimination with partial pivoting; solves A X = B.
inline Mat solve(Mat a, Mat b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) throw std::runtime_error("singular");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            for (std::size_t j = 0; j < b[0].size(); ++j) b[r][j] -= f * b[col][j];
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        for (auto& v : b[r]) v /= a[r][r];
    return b;
}

inline Mat identity(std::size_t n) {
    Mat i = zeros(n, n);
    for (std::size_t k = 0; k < n; ++k) i[k][k] = 1.0;
    return i;
}

/// psi[i][l] = (i - K)^l.
inline Mat vandermonde(std::size_t m, std::size_t l) {
    const auto k = static_cast<double>((m - 1) / 2);
    Mat psi = zeros(m, l);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < l; ++j) psi[i][j] = std::pow(static_cast<double>(i) - k, static_cast<double>(j));
    return psi;
}

/// Weighted polynomial fit operator (psi^T W psi)^-1 psi^T W, built by
/// explicit normal equations.
inline Mat weighted_fit(const Mat& w, std::size_t l) {
    const auto psi = vandermonde(w.size(), l);
    const auto pt = transpose(psi);
    const auto ptw = mul(pt, w);
    return solve(mul(ptw, psi), ptw);
}

/// Window weights for the d-th derivative at the center: d! times row d of
/// the fit operator.
inline Vec derivative_window(const Mat& fit, std::size_t d) {
    double f = 1.0;
    for (std::size_t k = 2; k <= d; ++k) f *= static_cast<double>(k);
    Vec row = fit[d];
    for (auto& v : row) v *= f;
    return row;
}

/// Minimum-variance taps for covariance R under moment constraints, by
/// solving the full bordered system with the elimination above.
inline Vec bordered_taps(const Mat& r, std::size_t l) {
    const std::size_t m = r.size();
    const auto psi = vandermonde(m, l);
    Mat a = zeros(m + l, m + l);
    Mat b = zeros(m + l, 1);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a[i][j] = r[i][j];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < l; ++j) {
            a[i][m + j] = psi[i][j];
            a[m + j][i] = psi[i][j];
        }
    b[m][0] = 1.0;
    const auto x = solve(a, b);
    Vec h(m);
    for (std::size_t i = 0; i < m; ++i) h[i] = x[i][0];
    return h;
}

inline Mat toeplitz(const Vec& lags, std::size_t n) {
    Mat t = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[i][j] = lags[i > j ? i - j : j - i];
    return t;
}

/// Full linear convolution, then the slice where the kernel fully overlaps.
inline Vec convolve_valid(const Vec& x, const Vec& h) {
    Vec full(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j) full[i + j] += x[i] * h[j];
    return Vec(full.begin() + static_cast<std::ptrdiff_t>(h.size() - 1),
               full.begin() + static_cast<std::ptrdiff_t>(x.size()));
}

/// (1/2pi) integral of |H|^2 over [-pi, pi] by the trapezoid rule on [0, pi]
/// (the integrand is even for real taps).
inline double parseval_integral(const Vec& h, std::size_t points) {
    const double pi = std::numbers::pi;
    auto mag2 = [&](double w) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * std::polar(1.0, -w * static_cast<double>(i));
        return std::norm(acc);
    };
    const double step = pi / static_cast<double>(points - 1);
    double sum = 0.5 * (mag2(0.0) + mag2(pi));
    for (std::size_t k = 1; k + 1 < points; ++k) sum += mag2(step * static_cast<double>(k));
    return sum * step / pi;
}

/// Binomial coefficient as a double.
inline double binom(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

/// d-th derivative of x^p at x0, via the Taylor shift (x0 + t)^p.
inline double power_derivative(std::size_t p, std::size_t d, double x0) {
    if (d > p) return 0.0;
    double f = 1.0;
    for (std::size_t k = 2; k <= d; ++k) f *= static_cast<double>(k);
    return f * binom(p, d) * std::pow(x0, static_cast<double>(p - d));
}

} // namespace oracle
