// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "csg/error.hpp"
#include "csg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csg {

/// Uniformly sampled input, millivolts. Non-finite samples are rejected.
class SampleSequence {
public:
    explicit SampleSequence(std::vector<double> values, double sample_period = 1.0)
        : values_(std::move(values)), sample_period_(sample_period) {
        detail::require(sample_period_ > 0.0, "sample period must be positive");
        for (std::size_t n = 0; n < values_.size(); ++n) {
            if (!std::isfinite(values_[n]))
                throw ValidationError("non-finite sample at index " + std::to_string(n));
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    double sample_period() const noexcept { return sample_period_; }
    double operator[](std::size_t n) const { return values_[n]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
    double sample_period_;
};

/// Output of a valid-region operation: values[j] belongs to input sample
/// first_index + j (the window center). first_index equals the group delay
/// K of the causal realization.
struct AlignedSeries {
    std::size_t first_index = 0;
    std::vector<double> values;
};

/// Feature vectors for every center where the full window fits;
/// column j is the estimate at sample first_index + j.
struct FeatureSeries {
    std::size_t first_index = 0;
    Matrix coefficients; ///< L x (N - 2K)

    std::size_t size() const noexcept { return static_cast<std::size_t>(coefficients.cols()); }
    std::size_t terms() const noexcept { return static_cast<std::size_t>(coefficients.rows()); }
    Vector at(std::size_t j) const { return coefficients.col(static_cast<Eigen::Index>(j)); }
};

namespace detail {

inline std::size_t window_half_width(Eigen::Index length) {
    require(length >= 1 && length % 2 == 1, "window length must be odd");
    return static_cast<std::size_t>((length - 1) / 2);
}

} // namespace detail

/// y[n] = sum_{m=-K..K} h[m] x[n-m] for every n with a full window.
inline AlignedSeries convolve(const SampleSequence& x, const Vector& taps) {
    const std::size_t k = detail::window_half_width(taps.size());
    const auto m = static_cast<std::size_t>(taps.size());
    if (x.size() < m)
        throw ValidationError("input of " + std::to_string(x.size()) + " samples is shorter than the filter (" +
                              std::to_string(m) + ")");
    AlignedSeries y{k, std::vector<double>(x.size() - 2 * k)};
    for (std::size_t n = k; n + k < x.size(); ++n) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += taps(static_cast<Eigen::Index>(i)) * x[n + k - i];
        y.values[n - k] = acc;
    }
    return y;
}

/// alpha = H x for one window of M samples, centered coordinates.
inline Vector analyze(std::span<const double> window, const Matrix& analysis) {
    if (window.size() != static_cast<std::size_t>(analysis.cols()))
        throw ValidationError("analysis window must have exactly M = " + std::to_string(analysis.cols()) +
                              " samples");
    const Eigen::Map<const Vector> x(window.data(), static_cast<Eigen::Index>(window.size()));
    return analysis * x;
}

/// S = psi alpha over the +-K window.
inline Vector synthesize(const Vector& alpha, const Matrix& psi) {
    detail::require(alpha.size() == psi.cols(), "feature vector length must equal L");
    return psi * alpha;
}

/// Slides `analyze` over every interior center.
inline FeatureSeries run_bank(const SampleSequence& x, const Matrix& analysis) {
    const auto m = static_cast<std::size_t>(analysis.cols());
    const std::size_t k = detail::window_half_width(analysis.cols());
    if (x.size() < m)
        throw ValidationError("input of " + std::to_string(x.size()) + " samples is shorter than the filter (" +
                              std::to_string(m) + ")");
    const std::size_t count = x.size() - 2 * k;
    FeatureSeries out{k, Matrix(analysis.rows(), static_cast<Eigen::Index>(count))};
    const auto values = x.values();
    for (std::size_t j = 0; j < count; ++j)
        out.coefficients.col(static_cast<Eigen::Index>(j)) = analyze(values.subspan(j, m), analysis);
    return out;
}

/// Sample-at-a-time filter bank over a ring buffer. Produces the same
/// feature vectors as run_bank, delayed by K samples.
class StreamingBank {
public:
    explicit StreamingBank(Matrix analysis)
        : analysis_(std::move(analysis)), ring_(static_cast<std::size_t>(analysis_.cols()), 0.0),
          window_(ring_.size()) {
        detail::window_half_width(analysis_.cols());
    }

    /// Feeds one sample; returns the feature vector for the center K samples
    /// back once a full window has been seen.
    std::optional<Vector> push(double sample) {
        if (!std::isfinite(sample)) throw ValidationError("non-finite sample");
        ring_[head_] = sample;
        head_ = (head_ + 1) % ring_.size();
        if (filled_ < ring_.size()) ++filled_;
        if (filled_ < ring_.size()) return std::nullopt;
        for (std::size_t i = 0; i < ring_.size(); ++i) window_[i] = ring_[(head_ + i) % ring_.size()];
        return analyze(window_, analysis_);
    }

    void reset() {
        std::fill(ring_.begin(), ring_.end(), 0.0);
        head_ = 0;
        filled_ = 0;
    }

private:
    Matrix analysis_;
    std::vector<double> ring_;
    std::vector<double> window_;
    std::size_t head_ = 0;
    std::size_t filled_ = 0;
};

} // namespace csg
