// SPDX-License-Identifier: Apache-2.0
//
// Pulse detection statistic. For each feature vector alpha, a foreground
// (pulse) and a background (clutter) hypothesis are formed by masking
// coefficients, and
//
//     Z = |U alpha_1|^2 / (|U alpha_0|^2 + eps),
//
// where U^T U = psi^T W_s psi and W_s is the weight matrix divided by its
// largest element. |U alpha|^2 equals S^T W_s S for the synthesized window
// S = psi alpha.
#pragma once

#include "csg/analysis_bank.hpp"
#include "csg/error.hpp"
#include "csg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace csg {

/// Which monomial coefficients survive under each hypothesis.
class HypothesisMask {
public:
    /// Foreground keeps only `foreground_keep`; background zeroes `background_zero`.
    HypothesisMask(std::size_t terms, std::vector<std::size_t> foreground_keep,
                   std::vector<std::size_t> background_zero)
        : foreground_(static_cast<Eigen::Index>(terms)), background_(static_cast<Eigen::Index>(terms)) {
        foreground_.setZero();
        background_.setOnes();
        for (auto l : foreground_keep) {
            detail::require(l < terms, "foreground index " + std::to_string(l) + " out of range");
            foreground_(static_cast<Eigen::Index>(l)) = 1.0;
        }
        for (auto l : background_zero) {
            detail::require(l < terms, "background index " + std::to_string(l) + " out of range");
            background_(static_cast<Eigen::Index>(l)) = 0.0;
        }
    }

    /// Quadratic-pulse hypotheses: foreground keeps l = 2, background drops
    /// the dc (l = 0) and quadratic (l = 2) terms.
    static HypothesisMask quadratic_pulse(std::size_t terms) {
        detail::require(terms >= 3, "quadratic-pulse masks need L >= 3");
        return HypothesisMask(terms, {2}, {0, 2});
    }

    std::size_t terms() const noexcept { return static_cast<std::size_t>(foreground_.size()); }
    Vector foreground(const Vector& alpha) const { return alpha.cwiseProduct(foreground_); }
    Vector background(const Vector& alpha) const { return alpha.cwiseProduct(background_); }
    bool keeps_foreground(std::size_t l) const { return foreground_(static_cast<Eigen::Index>(l)) != 0.0; }
    bool keeps_background(std::size_t l) const { return background_(static_cast<Eigen::Index>(l)) != 0.0; }

private:
    Vector foreground_;
    Vector background_;
};

struct OrthoTransform {
    Matrix upper;          ///< U, L x L upper triangular
    Matrix scaled_weight;  ///< W_s, largest entry exactly 1
};

/// Cholesky factor of psi^T W_s psi. Rejects a normal matrix that is not
/// positive definite.
inline OrthoTransform build_ortho_transform(const Matrix& psi, const Matrix& weight) {
    detail::require(weight.rows() == weight.cols() && weight.rows() == psi.rows(), "W and psi dimensions disagree");
    const double peak = weight.maxCoeff();
    if (!(peak > 0.0)) throw NumericalError("weight matrix has no positive element to scale by");
    OrthoTransform t;
    t.scaled_weight = weight / peak;
    const Matrix normal = psi.transpose() * t.scaled_weight * psi;
    Eigen::LLT<Matrix> llt(normal);
    if (llt.info() != Eigen::Success)
        throw NumericalError("psi^T W psi is not positive definite; no Cholesky factor exists");
    t.upper = llt.matrixU();
    if ((t.upper.diagonal().array() <= 0.0).any())
        throw NumericalError("psi^T W psi is not positive definite; no Cholesky factor exists");
    return t;
}

inline constexpr double kDefaultEpsilon = 1e-3;
inline constexpr double kDefaultThresholdDb = 20.0;

/// Z[j] belongs to input sample first_index + j.
struct StatisticSeries {
    std::size_t first_index = 0;
    std::vector<double> z;

    std::size_t size() const noexcept { return z.size(); }
    std::size_t last_index() const noexcept { return first_index + z.size() - 1; }
};

/// 10 log10 Z, clamped below at -300 dB.
inline double power_db(double z) {
    if (!(z > 0.0)) return -300.0;
    return std::max(-300.0, 10.0 * std::log10(z));
}

inline std::vector<double> to_db(const StatisticSeries& s) {
    std::vector<double> out(s.z.size());
    std::transform(s.z.begin(), s.z.end(), out.begin(), power_db);
    return out;
}

/// Foreground and background powers for one feature vector.
struct HypothesisPowers {
    double foreground;
    double background;
};

inline HypothesisPowers hypothesis_powers(const Vector& alpha, const OrthoTransform& t, const HypothesisMask& mask) {
    const Vector b1 = t.upper * mask.foreground(alpha);
    const Vector b0 = t.upper * mask.background(alpha);
    return {b1.squaredNorm(), b0.squaredNorm()};
}

inline StatisticSeries compute_statistic(const FeatureSeries& features, const OrthoTransform& t,
                                         const HypothesisMask& mask, double epsilon = kDefaultEpsilon) {
    detail::require(epsilon > 0.0, "epsilon must be positive");
    detail::require(mask.terms() == features.terms() && t.upper.rows() == features.coefficients.rows(),
                    "mask, transform and features disagree on L");
    StatisticSeries out{features.first_index, std::vector<double>(features.size())};
    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto p = hypothesis_powers(features.at(j), t, mask);
        out.z[j] = p.foreground / (p.background + epsilon);
    }
    return out;
}

/// Sample indices where Z exceeds the threshold. With `collapse_runs`, each
/// contiguous run of crossings is reduced to its peak.
inline std::vector<std::size_t> threshold_detect(const StatisticSeries& s, double threshold_db = kDefaultThresholdDb,
                                                 bool collapse_runs = false) {
    std::vector<std::size_t> events;
    std::size_t run_peak = 0;
    bool in_run = false;
    for (std::size_t j = 0; j < s.z.size(); ++j) {
        const bool hit = power_db(s.z[j]) > threshold_db;
        if (!collapse_runs) {
            if (hit) events.push_back(s.first_index + j);
            continue;
        }
        if (hit) {
            if (!in_run || s.z[j] > s.z[run_peak]) run_peak = j;
            in_run = true;
        } else if (in_run) {
            events.push_back(s.first_index + run_peak);
            in_run = false;
        }
    }
    if (collapse_runs && in_run) events.push_back(s.first_index + run_peak);
    return events;
}

/// Inclusive range of input samples covered by a pulse.
struct PulseExtent {
    std::size_t first;
    std::size_t last;
};

/// Peak Z (dB) over each pulse support widened by K samples on both sides
/// and clipped to the interior where Z exists.
inline std::vector<double> peak_snr(const StatisticSeries& s, const std::vector<PulseExtent>& extents,
                                    std::size_t half_width) {
    std::vector<double> out;
    out.reserve(extents.size());
    if (s.z.empty()) {
        if (!extents.empty()) throw ValidationError("no statistic samples to search");
        return out;
    }
    for (const auto& e : extents) {
        detail::require(e.first <= e.last, "pulse extent is empty");
        if (e.last < s.first_index || e.first > s.last_index())
            throw ValidationError("pulse extent [" + std::to_string(e.first) + ", " + std::to_string(e.last) +
                                  "] lies outside the interior sample range");
        const std::size_t lo = std::max(s.first_index, e.first > half_width ? e.first - half_width : 0);
        const std::size_t hi = std::min(s.last_index(), e.last + half_width);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t n = lo; n <= hi; ++n) best = std::max(best, power_db(s.z[n - s.first_index]));
        out.push_back(best);
    }
    return out;
}

struct DetectionReport {
    StatisticSeries statistic;
    double threshold_db = kDefaultThresholdDb;
    std::vector<std::size_t> events;
    std::vector<double> peak_snr_db; ///< one per supplied pulse extent

    bool detected_at(std::size_t n) const { return std::binary_search(events.begin(), events.end(), n); }
};

struct DetectorConfig {
    double epsilon = kDefaultEpsilon;
    double threshold_db = kDefaultThresholdDb;
    bool collapse_runs = false;
};

inline DetectionReport detect(const FeatureSeries& features, const OrthoTransform& t, const HypothesisMask& mask,
                              const DetectorConfig& config = {}, const std::vector<PulseExtent>& truth = {}) {
    DetectionReport r;
    r.statistic = compute_statistic(features, t, mask, config.epsilon);
    r.threshold_db = config.threshold_db;
    r.events = threshold_detect(r.statistic, config.threshold_db, config.collapse_runs);
    r.peak_snr_db = peak_snr(r.statistic, truth, features.first_index);
    return r;
}

} // namespace csg
