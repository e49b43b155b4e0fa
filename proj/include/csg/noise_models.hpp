// SPDX-License-Identifier: Apache-2.0
//
// Autocorrelation models for colored noise and the weight matrices W = R^-1
// that whiten them. Lags and angular frequencies are in samples and
// radians/sample unless a field says otherwise.
#pragma once

#include "csg/error.hpp"
#include "csg/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace csg {

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

namespace noise {

struct White {};

/// Diagonal W with a Gaussian kernel of standard deviation `lambda_n` samples.
struct DiagonalGaussianKernel {
    double lambda_n;
};

/// First-order low-pass model, R[m] = rho^|m| with rho = exp(-1/lambda_n).
struct GaussMarkovLowPass {
    double lambda_n;
};

/// First-order pole at the Nyquist frequency, rho = -exp(sigma_nb * T_s).
struct NyquistFirstOrder {
    double sigma_nb; ///< 1/seconds, must be negative
};

struct Pole {
    double sigma_nb; ///< real part, 1/seconds, must be negative
    double omega;    ///< natural frequency, radians/second
};

/// Sum of damped cosines, one per conjugate pole pair.
struct NarrowBand {
    std::vector<Pole> poles;
};

/// Unit spectral density over omega_c <= |w| <= omega_d (radians/sample).
struct WideBand {
    double omega_c;
    double omega_d = std::numbers::pi;
};

} // namespace noise

struct NoiseModelSpec {
    using Variant = std::variant<noise::White, noise::DiagonalGaussianKernel,
                                 noise::GaussMarkovLowPass, noise::NyquistFirstOrder,
                                 noise::NarrowBand, noise::WideBand>;

    Variant model = noise::White{};
    double sample_period = 1.0; ///< T_s, seconds/sample

    /// Number of narrow-band pole pairs (N_NB); 1 for the Nyquist model, 0 otherwise.
    std::size_t pole_count() const {
        if (const auto* nb = std::get_if<noise::NarrowBand>(&model)) return nb->poles.size();
        if (std::holds_alternative<noise::NyquistFirstOrder>(model)) return 1;
        return 0;
    }
};

inline std::string model_name(const NoiseModelSpec& spec) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, noise::White>) return "white";
            else if constexpr (std::is_same_v<T, noise::DiagonalGaussianKernel>) return "gaussian_kernel";
            else if constexpr (std::is_same_v<T, noise::GaussMarkovLowPass>) return "gauss_markov";
            else if constexpr (std::is_same_v<T, noise::NyquistFirstOrder>) return "nyquist";
            else if constexpr (std::is_same_v<T, noise::NarrowBand>) return "narrow_band";
            else return "wide_band";
        },
        spec.model);
}

/// Throws ValidationError when a parameter lies outside its valid range.
inline void validate(const NoiseModelSpec& spec) {
    using detail::require;
    const double ts = spec.sample_period;
    require(std::isfinite(ts) && ts > 0.0, "sample period must be positive");
    std::visit(
        [ts](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, noise::DiagonalGaussianKernel> ||
                          std::is_same_v<T, noise::GaussMarkovLowPass>) {
                require(m.lambda_n > 0.0, "lambda_n must be positive");
            } else if constexpr (std::is_same_v<T, noise::NyquistFirstOrder>) {
                require(m.sigma_nb < 0.0, "sigma_nb must be negative for a stable pole");
            } else if constexpr (std::is_same_v<T, noise::NarrowBand>) {
                require(!m.poles.empty(), "narrow-band model needs at least one pole");
                for (const auto& p : m.poles) {
                    require(p.sigma_nb < 0.0, "sigma_nb must be negative for a stable pole");
                    require(p.omega >= 0.0, "pole frequency must be non-negative");
                    require(p.omega * ts <= std::numbers::pi * (1.0 + 1e-12),
                            "pole frequency above Nyquist (omega * T_s > pi)");
                }
            } else if constexpr (std::is_same_v<T, noise::WideBand>) {
                require(m.omega_c > 0.0, "wide-band cut-off must be positive");
                require(m.omega_c < m.omega_d, "wide-band cut-off must be below the band edge");
                require(m.omega_d <= std::numbers::pi * (1.0 + 1e-12),
                        "wide-band band edge above Nyquist");
            }
        },
        spec.model);
}

// ---------------------------------------------------------------------------
// Autocorrelation sequences
// ---------------------------------------------------------------------------

/// One-sided autocorrelation R[0..max_lag]; R[-m] = R[m].
class AutocorrSequence {
public:
    explicit AutocorrSequence(std::vector<double> values) : values_(std::move(values)) {
        detail::require(!values_.empty(), "autocorrelation needs at least R[0]");
        detail::require(values_[0] > 0.0, "autocorrelation R[0] must be positive");
        const double bound = values_[0] * (1.0 + 1e-12);
        for (double r : values_) {
            detail::require(std::isfinite(r) && std::abs(r) <= bound,
                            "autocorrelation violates |R[m]| <= R[0]");
        }
    }

    std::size_t max_lag() const noexcept { return values_.size() - 1; }
    double operator[](std::ptrdiff_t lag) const { return values_.at(static_cast<std::size_t>(std::abs(lag))); }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

namespace detail {

/// 2 sin(w m)/m with the m = 0 continuity limit 2w.
inline double band_edge_autocorr(double omega, std::size_t lag) {
    if (lag == 0) return 2.0 * omega;
    const double m = static_cast<double>(lag);
    return 2.0 * std::sin(omega * m) / m;
}

} // namespace detail

/// Band-limited white noise between omega_c and omega_d.
inline AutocorrSequence wideband_autocorr(double omega_c, double omega_d, std::size_t max_lag) {
    validate(NoiseModelSpec{noise::WideBand{omega_c, omega_d}, 1.0});
    std::vector<double> r(max_lag + 1);
    for (std::size_t m = 0; m <= max_lag; ++m) {
        r[m] = detail::band_edge_autocorr(omega_d, m) - detail::band_edge_autocorr(omega_c, m);
    }
    return AutocorrSequence(std::move(r));
}

/// Sum of exp(sigma T_s |m|) cos(Omega T_s m) over the poles.
inline AutocorrSequence narrowband_autocorr(const std::vector<noise::Pole>& poles, double sample_period,
                                            std::size_t max_lag) {
    validate(NoiseModelSpec{noise::NarrowBand{poles}, sample_period});
    std::vector<double> r(max_lag + 1, 0.0);
    for (const auto& p : poles) {
        const double decay = p.sigma_nb * sample_period;
        const double w = p.omega * sample_period;
        for (std::size_t m = 0; m <= max_lag; ++m) {
            const double md = static_cast<double>(m);
            r[m] += std::exp(decay * md) * std::cos(w * md);
        }
    }
    return AutocorrSequence(std::move(r));
}

/// rho^|m| for a single real pole, |rho| < 1.
inline AutocorrSequence first_order_autocorr(double rho, std::size_t max_lag) {
    detail::require(std::abs(rho) < 1.0, "first-order pole must satisfy |rho| < 1");
    std::vector<double> r(max_lag + 1);
    double v = 1.0;
    for (std::size_t m = 0; m <= max_lag; ++m) {
        r[m] = v;
        v *= rho;
    }
    return AutocorrSequence(std::move(r));
}

inline AutocorrSequence gauss_markov_lowpass_autocorr(double lambda_n, std::size_t max_lag) {
    detail::require(lambda_n > 0.0, "lambda_n must be positive");
    return first_order_autocorr(std::exp(-1.0 / lambda_n), max_lag);
}

inline AutocorrSequence nyquist_autocorr(double sigma_nb, double sample_period, std::size_t max_lag) {
    validate(NoiseModelSpec{noise::NyquistFirstOrder{sigma_nb}, sample_period});
    return first_order_autocorr(-std::exp(sigma_nb * sample_period), max_lag);
}

/// Real pole of a first-order model, if the spec reduces to one. A single
/// narrow-band pole at dc or Nyquist is first order.
inline std::optional<double> first_order_pole(const NoiseModelSpec& spec) {
    const double ts = spec.sample_period;
    if (const auto* gm = std::get_if<noise::GaussMarkovLowPass>(&spec.model))
        return std::exp(-1.0 / gm->lambda_n);
    if (const auto* ny = std::get_if<noise::NyquistFirstOrder>(&spec.model))
        return -std::exp(ny->sigma_nb * ts);
    if (const auto* nb = std::get_if<noise::NarrowBand>(&spec.model); nb && nb->poles.size() == 1) {
        const auto& p = nb->poles.front();
        const double w = p.omega * ts;
        if (w == 0.0) return std::exp(p.sigma_nb * ts);
        if (std::abs(w - std::numbers::pi) <= 1e-12) return -std::exp(p.sigma_nb * ts);
    }
    return std::nullopt;
}

/// Autocorrelation of the model out to `max_lag`, or nullopt for the
/// diagonal kernel (which defines W directly).
inline std::optional<AutocorrSequence> autocorr_for(const NoiseModelSpec& spec, std::size_t max_lag) {
    validate(spec);
    return std::visit(
        [&](const auto& m) -> std::optional<AutocorrSequence> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, noise::White>) {
                std::vector<double> r(max_lag + 1, 0.0);
                r[0] = 1.0;
                return AutocorrSequence(std::move(r));
            } else if constexpr (std::is_same_v<T, noise::DiagonalGaussianKernel>) {
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, noise::GaussMarkovLowPass>) {
                return gauss_markov_lowpass_autocorr(m.lambda_n, max_lag);
            } else if constexpr (std::is_same_v<T, noise::NyquistFirstOrder>) {
                return nyquist_autocorr(m.sigma_nb, spec.sample_period, max_lag);
            } else if constexpr (std::is_same_v<T, noise::NarrowBand>) {
                return narrowband_autocorr(m.poles, spec.sample_period, max_lag);
            } else {
                return wideband_autocorr(m.omega_c, m.omega_d, max_lag);
            }
        },
        spec.model);
}

// ---------------------------------------------------------------------------
// Toeplitz and weight matrices
// ---------------------------------------------------------------------------

/// Symmetric Toeplitz matrix with entry [i, j] = R[|i - j|].
inline Matrix toeplitz_from_autocorr(const AutocorrSequence& r, std::size_t size) {
    detail::require(size >= 1 && r.max_lag() + 1 >= size,
                    "autocorrelation must cover lags 0..M-1 for an MxM Toeplitz matrix");
    const auto n = static_cast<Eigen::Index>(size);
    Matrix t(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) t(i, j) = r[i - j];
    return t;
}

enum class WeightProvenance { Identity, DiagonalKernel, InverseToeplitz };

inline const char* to_string(WeightProvenance p) {
    switch (p) {
    case WeightProvenance::Identity: return "identity";
    case WeightProvenance::DiagonalKernel: return "diagonal-kernel";
    case WeightProvenance::InverseToeplitz: return "inverse-toeplitz";
    }
    return "unknown";
}

struct WeightMatrix {
    Matrix w;
    WeightProvenance provenance = WeightProvenance::Identity;
    /// Condition estimate of the source R (inverse-toeplitz) or of W itself.
    double condition = 1.0;

    Eigen::Index size() const noexcept { return w.rows(); }
};

inline WeightMatrix identity_weight(std::size_t size) {
    const auto n = static_cast<Eigen::Index>(size);
    return {Matrix::Identity(n, n), WeightProvenance::Identity, 1.0};
}

/// Diagonal W with w[m] = exp(-m^2 / (2 lambda_n^2)), m = -K..K.
inline WeightMatrix gaussian_kernel_weights(double lambda_n, std::size_t half_width) {
    detail::require(lambda_n > 0.0, "lambda_n must be positive");
    const auto k = static_cast<std::ptrdiff_t>(half_width);
    Vector diag(2 * k + 1);
    for (std::ptrdiff_t m = -k; m <= k; ++m) {
        const double md = static_cast<double>(m);
        diag(m + k) = std::exp(-md * md / (2.0 * lambda_n * lambda_n));
    }
    return {diag.asDiagonal(), WeightProvenance::DiagonalKernel, linalg::diagonal_condition(diag)};
}

namespace detail {

inline void check_inverse_residual(const Matrix& r, const Matrix& w, double condition) {
    const auto n = r.rows();
    const double residual = linalg::inf_norm(r * w - Matrix::Identity(n, n));
    if (!(residual <= 1e-6 * static_cast<double>(n))) {
        throw NumericalError("R is too ill-conditioned to invert (residual " + std::to_string(residual) +
                                 "); increase |sigma_nb| or widen the noise band",
                             condition);
    }
}

} // namespace detail

/// Dense W = R^-1 with a residual check ||R W - I||_inf <= 1e-6 M.
inline WeightMatrix invert_to_weight(const Matrix& r) {
    detail::require(r.rows() == r.cols() && r.rows() > 0, "R must be square");
    detail::require(linalg::asymmetry(r) <= 1e-12, "R must be symmetric");
    const double condition = linalg::symmetric_condition(r);
    if (!std::isfinite(condition)) throw NumericalError("R is singular", condition);
    const auto n = r.rows();
    Eigen::PartialPivLU<Matrix> lu(r);
    Matrix w = lu.solve(Matrix::Identity(n, n));
    w = 0.5 * (w + w.transpose()).eval();
    detail::check_inverse_residual(r, w, condition);
    return {std::move(w), WeightProvenance::InverseToeplitz, condition};
}

/// Closed-form tridiagonal inverse of the KMS matrix rho^|i-j|.
inline WeightMatrix kms_inverse(double rho, std::size_t size) {
    detail::require(std::abs(rho) < 1.0, "first-order pole must satisfy |rho| < 1");
    detail::require(size >= 1, "matrix size must be positive");
    const auto n = static_cast<Eigen::Index>(size);
    const double scale = 1.0 / (1.0 - rho * rho);
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool edge = (i == 0 || i == n - 1);
        w(i, i) = (edge ? 1.0 : 1.0 + rho * rho) * scale;
        if (i + 1 < n) {
            w(i, i + 1) = -rho * scale;
            w(i + 1, i) = -rho * scale;
        }
    }
    if (n == 1) w(0, 0) = 1.0;
    const Matrix r = toeplitz_from_autocorr(first_order_autocorr(rho, size - 1), size);
    const double condition = linalg::symmetric_condition(r);
    detail::check_inverse_residual(r, w, condition);
    return {std::move(w), WeightProvenance::InverseToeplitz, condition};
}

/// Whitening weight for an M-sample window under the given model.
inline WeightMatrix weight_for(const NoiseModelSpec& spec, std::size_t size) {
    validate(spec);
    detail::require(size % 2 == 1, "window length must be odd");
    if (std::holds_alternative<noise::White>(spec.model)) return identity_weight(size);
    if (const auto* g = std::get_if<noise::DiagonalGaussianKernel>(&spec.model))
        return gaussian_kernel_weights(g->lambda_n, (size - 1) / 2);
    if (const auto rho = first_order_pole(spec)) return kms_inverse(*rho, size);
    return invert_to_weight(toeplitz_from_autocorr(*autocorr_for(spec, size - 1), size));
}

} // namespace csg
