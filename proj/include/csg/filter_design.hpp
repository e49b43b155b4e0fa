// SPDX-License-Identifier: Apache-2.0
//
// Whitened Savitzky-Golay design. A filter minimizes h^T R h subject to the
// moment constraints psi^T h = mu, either through the bordered (KKT) system
// or through the equivalent weighted least-squares analysis matrix
// H = (psi^T W psi)^-1 psi^T W with W = R^-1.
#pragma once

#include "csg/error.hpp"
#include "csg/linalg.hpp"
#include "csg/noise_models.hpp"
#include "csg/response.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

namespace csg {

struct DesignSpec {
    std::size_t length = 17;    ///< M, odd
    std::size_t terms = 5;      ///< L, number of monomials (polynomial degree + 1)
    std::size_t derivative = 0; ///< d
    NoiseModelSpec noise{};     ///< also carries T_s

    std::size_t half_width() const noexcept { return (length - 1) / 2; }
    double sample_period() const noexcept { return noise.sample_period; }

    /// Zero-placement freedom of a linear-phase design: N_K - N_L, with
    /// N_K = K_M + 1 symmetric taps and N_L = floor((L-1)/2) + 1 even moments.
    std::size_t free_zeros() const noexcept {
        const std::size_t nk = half_width() + 1;
        const std::size_t nl = (terms - 1) / 2 + 1;
        return nk > nl ? nk - nl : 0;
    }
};

inline void validate(const DesignSpec& spec) {
    using detail::require;
    require(spec.length >= 3 && spec.length % 2 == 1, "filter length M must be odd and at least 3");
    require(spec.terms >= 1 && spec.terms <= spec.length, "number of terms L must satisfy 1 <= L <= M");
    require(spec.derivative < spec.terms, "derivative order d must be below L");
    validate(spec.noise);
    require(spec.noise.pole_count() <= spec.free_zeros(),
            "narrow-band pole count " + std::to_string(spec.noise.pole_count()) + " exceeds N_K - N_L = " +
                std::to_string(spec.free_zeros()));
}

// ---------------------------------------------------------------------------
// Regression operators
// ---------------------------------------------------------------------------

/// psi[m, l] = m^l for m = -K..K, l = 0..L-1.
inline Matrix build_vandermonde(std::size_t length, std::size_t terms) {
    detail::require(length % 2 == 1, "filter length M must be odd");
    detail::require(terms >= 1 && terms <= length, "number of terms L must satisfy 1 <= L <= M");
    const auto n = static_cast<Eigen::Index>(length);
    const auto l = static_cast<Eigen::Index>(terms);
    const Eigen::Index k = (n - 1) / 2;
    Matrix psi(n, l);
    for (Eigen::Index row = 0; row < n; ++row) {
        const double m = static_cast<double>(row - k);
        double p = 1.0;
        for (Eigen::Index col = 0; col < l; ++col) {
            psi(row, col) = p;
            p *= m;
        }
    }
    return psi;
}

/// Maps monomial coefficients to those of the d-th time derivative,
/// scaled by T_s^-d. D^0 is the identity.
inline Matrix derivative_operator(std::size_t terms, std::size_t order, double sample_period = 1.0) {
    detail::require(order < terms, "derivative order d must be below L");
    detail::require(sample_period > 0.0, "sample period must be positive");
    const auto l = static_cast<Eigen::Index>(terms);
    const auto d = static_cast<Eigen::Index>(order);
    Matrix op = Matrix::Zero(l, l);
    const double scale = std::pow(sample_period, -static_cast<double>(order));
    for (Eigen::Index col = d; col < l; ++col) {
        double falling = 1.0; // col! / (col - d)!
        for (Eigen::Index j = 0; j < d; ++j) falling *= static_cast<double>(col - j);
        op(col - d, col) = falling * scale;
    }
    return op;
}

/// mu = [1, 0, ..., 0].
inline Vector moment_vector(std::size_t terms) {
    Vector mu = Vector::Zero(static_cast<Eigen::Index>(terms));
    mu(0) = 1.0;
    return mu;
}

namespace detail {

/// Convolution taps from a window-ordered weight row: h[m] = row[K - m].
inline Vector taps_from_window_weights(const Vector& row) { return row.reverse(); }

inline void check_solvable(const Matrix& a, const char* what) {
    const double condition = linalg::symmetric_condition(a);
    if (!std::isfinite(condition) || condition > 1e15) {
        throw NumericalError(std::string(what) + " is singular (condition " + std::to_string(condition) + ")",
                             condition);
    }
}

inline Matrix bordered_matrix(const Matrix& r, const Matrix& psi) {
    const auto m = r.rows();
    const auto l = psi.cols();
    Matrix a = Matrix::Zero(m + l, m + l);
    a.topLeftCorner(m, m) = r;
    a.topRightCorner(m, l) = psi;
    a.bottomLeftCorner(l, m) = psi.transpose();
    return a;
}

} // namespace detail

/// Analysis matrix from the bordered system: row l of H solves the KKT
/// problem with moment vector e_l. Avoids forming R^-1.
inline Matrix solve_kkt_bank(const Matrix& r, const Matrix& psi) {
    detail::require(r.rows() == r.cols() && r.rows() == psi.rows(), "R and psi dimensions disagree");
    const auto m = r.rows();
    const auto l = psi.cols();
    const Matrix a = detail::bordered_matrix(r, psi);
    detail::check_solvable(a, "bordered KKT system");
    Matrix rhs = Matrix::Zero(m + l, l);
    rhs.bottomRows(l) = Matrix::Identity(l, l);
    const Matrix sol = Eigen::PartialPivLU<Matrix>(a).solve(rhs);
    return sol.topRows(m).transpose();
}

/// Taps minimizing h^T R h subject to psi^T h = moments. The bordered
/// solution is window ordered and is reversed into shift-index order.
inline Vector solve_kkt(const Matrix& r, const Matrix& psi, const Vector& moments) {
    detail::require(moments.size() == psi.cols(), "moment vector length must equal L");
    detail::require(r.rows() == r.cols() && r.rows() == psi.rows(), "R and psi dimensions disagree");
    const auto m = r.rows();
    const Matrix a = detail::bordered_matrix(r, psi);
    detail::check_solvable(a, "bordered KKT system");
    Vector rhs = Vector::Zero(a.rows());
    rhs.tail(moments.size()) = moments;
    const Vector sol = Eigen::PartialPivLU<Matrix>(a).solve(rhs);
    return detail::taps_from_window_weights(sol.head(m));
}

/// H = (psi^T W psi)^-1 psi^T W.
inline Matrix solve_weighted_ls(const Matrix& w, const Matrix& psi) {
    detail::require(w.rows() == w.cols() && w.rows() == psi.rows(), "W and psi dimensions disagree");
    const Matrix normal = psi.transpose() * w * psi;
    detail::check_solvable(normal, "normal matrix psi^T W psi");
    return Eigen::PartialPivLU<Matrix>(normal).solve(psi.transpose() * w);
}

/// h^T = mu^T D^d H, returned in shift-index (convolution) order.
inline Vector extract_coefficients(const Matrix& analysis, const Matrix& derivative, const Vector& mu) {
    detail::require(analysis.rows() == derivative.rows() && derivative.rows() == mu.size(),
                    "operator dimensions disagree");
    const Vector row = (mu.transpose() * derivative * analysis).transpose();
    return detail::taps_from_window_weights(row);
}

// ---------------------------------------------------------------------------
// Designed filters
// ---------------------------------------------------------------------------

struct RegressionOperators {
    Matrix psi;        ///< M x L Vandermonde
    WeightMatrix weight;
    Matrix analysis;   ///< H, L x M
    Matrix derivative; ///< D^d, L x L
    Vector mu;
};

enum class SolveRoute { Auto, WeightedLeastSquares, BorderedKkt };

inline const char* to_string(SolveRoute r) {
    switch (r) {
    case SolveRoute::Auto: return "auto";
    case SolveRoute::WeightedLeastSquares: return "weighted-ls";
    case SolveRoute::BorderedKkt: return "bordered-kkt";
    }
    return "unknown";
}

/// Above this condition of R the bordered system is used by default.
inline constexpr double kKktConditionThreshold = 1e5;

struct Diagnostics {
    double white_noise_gain = 0.0;
    std::optional<double> first_null; ///< omega_delta, radians/sample
    double condition = 1.0;           ///< of R, or of W for diagonal weights
    SolveRoute route = SolveRoute::WeightedLeastSquares;
};

class DesignedFilter {
public:
    DesignedFilter(DesignSpec spec, std::string label, Vector taps, RegressionOperators ops, Diagnostics diag)
        : spec_(std::move(spec)), label_(std::move(label)), taps_(std::move(taps)), ops_(std::move(ops)),
          diag_(std::move(diag)) {}

    const DesignSpec& spec() const noexcept { return spec_; }
    const std::string& label() const noexcept { return label_; }

    /// h[m] for m = -K..K (element i is shift m = i - K).
    const Vector& taps() const noexcept { return taps_; }
    double tap(std::ptrdiff_t m) const { return taps_(m + static_cast<std::ptrdiff_t>(spec_.half_width())); }

    /// Weights applied to a window x[n-K..n+K] in sample order (taps reversed).
    Vector window_weights() const { return taps_.reverse(); }

    const RegressionOperators& operators() const noexcept { return ops_; }
    const Diagnostics& diagnostics() const noexcept { return diag_; }

private:
    DesignSpec spec_;
    std::string label_;
    Vector taps_;
    RegressionOperators ops_;
    Diagnostics diag_;
};

namespace detail {

/// Projects taps onto the exact (anti)symmetry of a linear-phase design.
inline Vector enforce_parity(const Vector& taps, std::size_t derivative) {
    const Vector rev = taps.reverse();
    return (derivative % 2 == 0) ? Vector(0.5 * (taps + rev)) : Vector(0.5 * (taps - rev));
}

} // namespace detail

/// Noise covariance matrix R for models defined by an autocorrelation;
/// nullopt for the diagonal kernel.
inline std::optional<Matrix> noise_covariance(const NoiseModelSpec& noise, std::size_t length) {
    auto r = autocorr_for(noise, length - 1);
    if (!r) return std::nullopt;
    return toeplitz_from_autocorr(*r, length);
}

inline DesignedFilter design(const DesignSpec& spec, std::string label = "custom",
                             SolveRoute route = SolveRoute::Auto) {
    validate(spec);
    RegressionOperators ops;
    ops.psi = build_vandermonde(spec.length, spec.terms);
    ops.derivative = derivative_operator(spec.terms, spec.derivative, spec.sample_period());
    ops.mu = moment_vector(spec.terms);
    ops.weight = weight_for(spec.noise, spec.length);

    const auto covariance = noise_covariance(spec.noise, spec.length);
    const bool diagonal = ops.weight.provenance != WeightProvenance::InverseToeplitz;
    if (route == SolveRoute::Auto) {
        route = (diagonal || ops.weight.condition <= kKktConditionThreshold) ? SolveRoute::WeightedLeastSquares
                                                                           : SolveRoute::BorderedKkt;
    }
    if (route == SolveRoute::BorderedKkt) {
        const Matrix r = covariance ? *covariance : Matrix(ops.weight.w.diagonal().cwiseInverse().asDiagonal());
        ops.analysis = solve_kkt_bank(r, ops.psi);
    } else {
        ops.analysis = solve_weighted_ls(ops.weight.w, ops.psi);
    }

    Vector taps = detail::enforce_parity(extract_coefficients(ops.analysis, ops.derivative, ops.mu), spec.derivative);

    Diagnostics diag;
    diag.white_noise_gain = white_noise_gain(taps);
    diag.first_null = first_null_frequency(taps);
    diag.condition = ops.weight.condition;
    diag.route = route;
    return DesignedFilter(spec, std::move(label), std::move(taps), std::move(ops), diag);
}

} // namespace csg
