// SPDX-License-Identifier: Apache-2.0
//
// The six reference designs A-F. All share M, L and d; B-F take their noise
// cut-off from the first null of the plain design A at the same (M, L).
#pragma once

#include "csg/filter_design.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csg {

enum class Preset { A, B, C, D, E, F };

inline constexpr std::array<Preset, 6> kAllPresets{Preset::A, Preset::B, Preset::C,
                                                   Preset::D, Preset::E, Preset::F};

inline char to_char(Preset p) { return static_cast<char>('A' + static_cast<int>(p)); }

inline Preset parse_preset(std::string_view s) {
    if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'F') return static_cast<Preset>(s[0] - 'A');
    if (s.size() == 1 && s[0] >= 'a' && s[0] <= 'f') return static_cast<Preset>(s[0] - 'a');
    throw ValidationError("unknown preset '" + std::string(s) + "' (expected A-F)");
}

/// Pole real part used for the Nyquist and narrow-band presets.
inline constexpr double kPresetSigmaNb = -1.0e-6;

/// Null frequencies of preset E, radians/second.
inline const std::vector<double>& preset_e_frequencies() {
    static const std::vector<double> w{0.8608, 1.6022, std::numbers::pi};
    return w;
}

struct PresetOverrides {
    std::optional<double> sigma_nb;
    std::optional<std::vector<double>> frequencies; ///< preset E pole frequencies
    std::optional<double> omega_c;                  ///< presets B, C, F
};

/// omega_c = 0.75 omega_delta of the plain smoother at (M, L).
inline double preset_cutoff(std::size_t length, std::size_t terms) {
    DesignSpec plain{length, terms, 0, {noise::White{}, 1.0}};
    const auto null = design(plain, "A").diagnostics().first_null;
    if (!null) throw NumericalError("reference design A has no first null; cannot derive omega_c");
    return cutoff_heuristic(*null);
}

inline NoiseModelSpec preset_noise(Preset preset, std::size_t length, std::size_t terms,
                                   const PresetOverrides& overrides = {}, double sample_period = 1.0) {
    const double sigma = overrides.sigma_nb.value_or(kPresetSigmaNb);
    auto cutoff = [&] { return overrides.omega_c ? *overrides.omega_c : preset_cutoff(length, terms); };
    NoiseModelSpec spec;
    spec.sample_period = sample_period;
    switch (preset) {
    case Preset::A: spec.model = noise::White{}; break;
    case Preset::B: spec.model = noise::DiagonalGaussianKernel{3.0 / cutoff()}; break;
    case Preset::C: spec.model = noise::GaussMarkovLowPass{3.0 / cutoff()}; break;
    case Preset::D: spec.model = noise::NyquistFirstOrder{sigma}; break;
    case Preset::E: {
        noise::NarrowBand nb;
        for (double w : overrides.frequencies.value_or(preset_e_frequencies())) nb.poles.push_back({sigma, w});
        spec.model = std::move(nb);
        break;
    }
    case Preset::F: spec.model = noise::WideBand{cutoff(), std::numbers::pi}; break;
    }
    return spec;
}

inline DesignedFilter design_preset(Preset preset, std::size_t length, std::size_t terms, std::size_t derivative = 0,
                                    const PresetOverrides& overrides = {}, double sample_period = 1.0,
                                    SolveRoute route = SolveRoute::Auto) {
    DesignSpec spec{length, terms, derivative, preset_noise(preset, length, terms, overrides, sample_period)};
    return design(spec, std::string(1, to_char(preset)), route);
}

} // namespace csg
