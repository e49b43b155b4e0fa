// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "csg/error.hpp"
#include "csg/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

namespace csg {

/// Taps are stored as a vector of odd length M; element i holds h[m] for
/// shift index m = i - (M-1)/2.
inline std::ptrdiff_t half_width(const Vector& taps) {
    return static_cast<std::ptrdiff_t>((taps.size() - 1) / 2);
}

/// Sum of squared taps (white-noise gain).
inline double white_noise_gain(const Vector& taps) { return taps.squaredNorm(); }

/// H(w) = sum_m h[m] exp(-i w m).
inline std::complex<double> response_at(const Vector& taps, double omega) {
    const auto k = half_width(taps);
    std::complex<double> acc{0.0, 0.0};
    for (Eigen::Index i = 0; i < taps.size(); ++i) {
        const double m = static_cast<double>(i - k);
        acc += taps(i) * std::polar(1.0, -omega * m);
    }
    return acc;
}

struct ResponsePoint {
    double omega;
    std::complex<double> value;
};

inline constexpr std::size_t kDefaultResponseGrid = 4096;
inline constexpr double kDbFloor = -300.0;

/// H(w) on grid_size uniformly spaced points covering [0, pi] inclusive.
inline std::vector<ResponsePoint> frequency_response(const Vector& taps,
                                                     std::size_t grid_size = kDefaultResponseGrid) {
    detail::require(grid_size >= 2, "response grid needs at least two points");
    std::vector<ResponsePoint> out;
    out.reserve(grid_size);
    const double step = std::numbers::pi / static_cast<double>(grid_size - 1);
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double w = (k + 1 == grid_size) ? std::numbers::pi : step * static_cast<double>(k);
        out.push_back({w, response_at(taps, w)});
    }
    return out;
}

/// 20 log10 |x|, clamped below at -300 dB.
inline double magnitude_db(double magnitude) {
    if (!(magnitude > 0.0)) return kDbFloor;
    return std::max(kDbFloor, 20.0 * std::log10(magnitude));
}

/// Roots of the tap polynomial z^K H(z), via companion-matrix eigenvalues.
inline std::vector<std::complex<double>> tap_polynomial_roots(const Vector& taps) {
    // Coefficient of z^(2K - i) is taps(i); strip zero leading/trailing terms.
    Eigen::Index first = 0, last = taps.size() - 1;
    while (first <= last && taps(first) == 0.0) ++first;
    while (last >= first && taps(last) == 0.0) --last;
    if (last - first < 1) return {};
    const Eigen::Index degree = last - first;
    Matrix companion = Matrix::Zero(degree, degree);
    const double lead = taps(first);
    for (Eigen::Index j = 0; j < degree; ++j) companion(0, j) = -taps(first + 1 + j) / lead;
    for (Eigen::Index j = 1; j < degree; ++j) companion(j, j - 1) = 1.0;
    Eigen::EigenSolver<Matrix> eig(companion, false);
    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(degree));
    for (Eigen::Index j = 0; j < degree; ++j) roots.push_back(eig.eigenvalues()(j));
    return roots;
}

/// Smallest argument in (0, pi] among roots within `radius_tol` of the unit circle.
inline std::optional<double> first_null_by_roots(const Vector& taps, double radius_tol = 1e-3) {
    std::optional<double> best;
    for (const auto& z : tap_polynomial_roots(taps)) {
        if (std::abs(1.0 - std::abs(z)) > radius_tol) continue;
        const double arg = std::arg(z);
        if (!(arg > 0.0)) continue;
        if (!best || arg < *best) best = arg;
    }
    return best;
}

namespace detail {

inline double golden_minimize(const Vector& taps, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = std::abs(response_at(taps, c)), fd = std::abs(response_at(taps, d));
    while (b - a > 1e-13) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - kInvPhi * (b - a);
            fc = std::abs(response_at(taps, c));
        } else {
            a = c; c = d; fc = fd;
            d = a + kInvPhi * (b - a);
            fd = std::abs(response_at(taps, d));
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

/// First local minimum of |H| over (0, pi] whose refined depth is below
/// 1e-6 of the reference gain (|H(0)|, or the peak gain if H(0) vanishes).
inline std::optional<double> first_null_by_grid(const Vector& taps, std::size_t grid_size = kDefaultResponseGrid) {
    const auto resp = frequency_response(taps, grid_size);
    std::vector<double> mag(resp.size());
    std::transform(resp.begin(), resp.end(), mag.begin(), [](const auto& p) { return std::abs(p.value); });
    double reference = mag.front();
    if (reference <= 1e-12 * *std::max_element(mag.begin(), mag.end()))
        reference = *std::max_element(mag.begin(), mag.end());
    const double step = resp[1].omega - resp[0].omega;
    for (std::size_t k = 1; k < mag.size(); ++k) {
        const bool left_ok = mag[k] <= mag[k - 1];
        const bool right_ok = (k + 1 == mag.size()) || mag[k] <= mag[k + 1];
        if (!(left_ok && right_ok)) continue;
        const double lo = resp[k].omega - step;
        const double hi = std::min(std::numbers::pi, resp[k].omega + step);
        const double w = detail::golden_minimize(taps, lo, hi);
        if (std::abs(response_at(taps, w)) <= 1e-6 * reference) return w;
    }
    return std::nullopt;
}

/// Frequency of the first null: the unit-circle zero closest to dc, with
/// the grid search as fallback when no root qualifies.
inline std::optional<double> first_null_frequency(const Vector& taps) {
    detail::require(taps.size() > 0 && taps.cwiseAbs().maxCoeff() > 0.0, "taps must be nonzero");
    if (auto w = first_null_by_roots(taps)) return w;
    return first_null_by_grid(taps);
}

inline constexpr double kCutoffFraction = 0.75;

/// omega_c = 0.75 omega_delta; approximates the -3 dB point of a plain SG filter.
inline double cutoff_heuristic(double first_null) {
    detail::require(first_null > 0.0, "first-null frequency must be positive");
    return kCutoffFraction * first_null;
}

/// Largest |H| beyond the first null, on the given grid. Zero when there is
/// no null.
inline double max_side_lobe(const Vector& taps, std::size_t grid_size = kDefaultResponseGrid) {
    const auto null = first_null_frequency(taps);
    if (!null) return 0.0;
    double peak = 0.0;
    for (const auto& p : frequency_response(taps, grid_size))
        if (p.omega > *null) peak = std::max(peak, std::abs(p.value));
    return peak;
}

} // namespace csg
