// SPDX-License-Identifier: Apache-2.0
//
// Synthetic pulse-detection scenarios and the experiment driver that runs
// every preset filter bank and the detector over them.
//
// Random numbers: std::mt19937_64 seeded with the scenario seed. Uniform
// variates take the top 53 bits of each draw, u = (x >> 11) * 2^-53.
// Gaussian variates use Box-Muller on (u1, u2) with u1 mapped to (0, 1],
// returning r cos(theta) then r sin(theta) from each pair. Draw order per
// trace: background phase, then (colored) interferer phases in frequency
// order, then white noise samples n = 0..N-1.
#pragma once

#include "csg/analysis_bank.hpp"
#include "csg/detector.hpp"
#include "csg/presets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace csg {

class ScenarioRng {
public:
    explicit ScenarioRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [0, 2 pi).
    double phase() { return 2.0 * std::numbers::pi * uniform(); }

    double gaussian() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Scenario description
// ---------------------------------------------------------------------------

enum class ScenarioTag { LowWhite, HighWhite, MatchedColored, MismatchedColored };

inline constexpr std::array<ScenarioTag, 4> kAllScenarios{ScenarioTag::LowWhite, ScenarioTag::HighWhite,
                                                          ScenarioTag::MatchedColored,
                                                          ScenarioTag::MismatchedColored};

inline const char* to_string(ScenarioTag t) {
    switch (t) {
    case ScenarioTag::LowWhite: return "low-white";
    case ScenarioTag::HighWhite: return "high-white";
    case ScenarioTag::MatchedColored: return "matched-colored";
    case ScenarioTag::MismatchedColored: return "mismatched-colored";
    }
    return "unknown";
}

inline ScenarioTag parse_scenario(std::string_view s) {
    for (auto t : kAllScenarios)
        if (s == to_string(t)) return t;
    throw ValidationError("unknown scenario tag '" + std::string(s) +
                          "' (expected low-white, high-white, matched-colored or mismatched-colored)");
}

inline constexpr double kDcOffset = 2.0;               // mV
inline constexpr double kBackgroundAmplitude = 5.0;    // mV
inline constexpr double kBackgroundFrequency = 0.0084; // rad/sample
inline constexpr double kInterfererAmplitude = 5.0;    // mV
inline constexpr double kLowWhiteSigma = 0.1;          // mV
inline constexpr double kHighWhiteSigma = 0.2;         // mV
inline constexpr std::array<double, 2> kMatchedFrequencies{0.8608, 1.6022};
inline constexpr std::array<double, 2> kMismatchedFrequencies{0.9469, 1.7624};

/// Noise standard deviation of a white scenario, 0 for colored ones.
inline double white_sigma(ScenarioTag t) {
    switch (t) {
    case ScenarioTag::LowWhite: return kLowWhiteSigma;
    case ScenarioTag::HighWhite: return kHighWhiteSigma;
    default: return 0.0;
    }
}

inline std::vector<double> interferer_frequencies(ScenarioTag t) {
    if (t == ScenarioTag::MatchedColored) return {kMatchedFrequencies.begin(), kMatchedFrequencies.end()};
    if (t == ScenarioTag::MismatchedColored) return {kMismatchedFrequencies.begin(), kMismatchedFrequencies.end()};
    return {};
}

inline bool is_colored(ScenarioTag t) {
    return t == ScenarioTag::MatchedColored || t == ScenarioTag::MismatchedColored;
}

struct ScenarioSpec {
    ScenarioTag tag = ScenarioTag::LowWhite;
    std::uint64_t seed = 0;
    double amplitude = 10.0;     ///< pulse peak, mV
    std::size_t length = 17;     ///< filter length M, sets the default gap
    std::size_t gap = 0;         ///< quiet samples between pulses; 0 selects 3M
    bool white_noise_in_colored = false;
    /// sigma of the optional white floor in colored scenarios
    double colored_white_sigma = kLowWhiteSigma;

    std::size_t effective_gap() const noexcept { return gap ? gap : 3 * length; }
};

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

enum class PulseKind { Quadratic, Square, Sawtooth };

inline const char* to_string(PulseKind k) {
    switch (k) {
    case PulseKind::Quadratic: return "quadratic";
    case PulseKind::Square: return "square";
    case PulseKind::Sawtooth: return "sawtooth";
    }
    return "unknown";
}

struct GroundTruthPulse {
    PulseKind kind;
    std::size_t duration;
    int polarity; ///< +1 or -1
    PulseExtent extent;
};

/// Index of the 17-sample quadratic pulse in the train.
inline constexpr std::size_t kMediumPulse = 1;

struct PulseTrain {
    std::vector<double> samples;
    std::vector<GroundTruthPulse> pulses;
};

inline double pulse_shape(PulseKind kind, std::size_t j, std::size_t duration) {
    const double t = static_cast<double>(j) / static_cast<double>(duration - 1);
    switch (kind) {
    case PulseKind::Quadratic: {
        const double u = 2.0 * t - 1.0;
        return 1.0 - u * u;
    }
    case PulseKind::Square: return 1.0;
    case PulseKind::Sawtooth: return t;
    }
    return 0.0;
}

/// Quadratic pulses of 9, 17 and 33 samples, then a 17-sample square and a
/// 17-sample sawtooth, alternating in sign from positive, each preceded by
/// `gap` quiet samples and followed by a trailing gap.
inline PulseTrain gen_pulse_train(double amplitude, std::size_t gap) {
    detail::require(amplitude > 0.0, "pulse amplitude must be positive");
    struct Shape {
        PulseKind kind;
        std::size_t duration;
    };
    constexpr std::array<Shape, 5> shapes{{{PulseKind::Quadratic, 9},
                                           {PulseKind::Quadratic, 17},
                                           {PulseKind::Quadratic, 33},
                                           {PulseKind::Square, 17},
                                           {PulseKind::Sawtooth, 17}}};
    std::size_t total = gap;
    for (const auto& s : shapes) total += s.duration + gap;

    PulseTrain train{std::vector<double>(total, 0.0), {}};
    std::size_t pos = gap;
    int sign = 1;
    for (const auto& s : shapes) {
        for (std::size_t j = 0; j < s.duration; ++j)
            train.samples[pos + j] = sign * amplitude * pulse_shape(s.kind, j, s.duration);
        train.pulses.push_back({s.kind, s.duration, sign, {pos, pos + s.duration - 1}});
        pos += s.duration + gap;
        sign = -sign;
    }
    return train;
}

struct Background {
    std::vector<double> dc;
    std::vector<double> sinusoid;
    double phase = 0.0;
};

/// 2 mV dc plus 5 sin(0.0084 n + phi), phi drawn uniformly.
inline Background gen_background(std::size_t count, ScenarioRng& rng) {
    Background b{std::vector<double>(count, kDcOffset), std::vector<double>(count), rng.phase()};
    for (std::size_t n = 0; n < count; ++n)
        b.sinusoid[n] = kBackgroundAmplitude * std::sin(kBackgroundFrequency * static_cast<double>(n) + b.phase);
    return b;
}

struct NoiseComponents {
    std::vector<double> white;
    std::vector<double> interferers;
    std::vector<double> frequencies;
    std::vector<double> phases;
};

inline NoiseComponents gen_noise(const ScenarioSpec& spec, std::size_t count, ScenarioRng& rng) {
    NoiseComponents out{std::vector<double>(count, 0.0), std::vector<double>(count, 0.0),
                        interferer_frequencies(spec.tag), {}};
    for (double w : out.frequencies) {
        const double phi = rng.phase();
        out.phases.push_back(phi);
        for (std::size_t n = 0; n < count; ++n)
            out.interferers[n] += kInterfererAmplitude * std::sin(w * static_cast<double>(n) + phi);
    }
    double sigma = white_sigma(spec.tag);
    if (is_colored(spec.tag) && spec.white_noise_in_colored) sigma = spec.colored_white_sigma;
    if (sigma > 0.0)
        for (auto& v : out.white) v = sigma * rng.gaussian();
    return out;
}

struct ScenarioTrace {
    ScenarioSpec spec;
    std::vector<double> composite;
    std::vector<double> pulses;
    std::vector<double> dc;
    std::vector<double> background;
    std::vector<double> white_noise;
    std::vector<double> interferers;
    std::vector<GroundTruthPulse> truth;
    double background_phase = 0.0;
    std::vector<double> interferer_phases;

    std::size_t size() const noexcept { return composite.size(); }

    std::vector<PulseExtent> extents() const {
        std::vector<PulseExtent> e;
        for (const auto& p : truth) e.push_back(p.extent);
        return e;
    }
};

/// Composite is summed as pulses + dc + background + white + interferers.
inline ScenarioTrace build_trace(const ScenarioSpec& spec) {
    detail::require(spec.length >= 3 && spec.length % 2 == 1, "filter length M must be odd and at least 3");
    detail::require(spec.effective_gap() >= spec.length, "inter-pulse gap must be at least M samples");
    ScenarioRng rng(spec.seed);
    auto train = gen_pulse_train(spec.amplitude, spec.effective_gap());
    const std::size_t count = train.samples.size();
    auto bg = gen_background(count, rng);
    auto nz = gen_noise(spec, count, rng);

    ScenarioTrace t;
    t.spec = spec;
    t.composite.resize(count);
    for (std::size_t n = 0; n < count; ++n)
        t.composite[n] = train.samples[n] + bg.dc[n] + bg.sinusoid[n] + nz.white[n] + nz.interferers[n];
    t.pulses = std::move(train.samples);
    t.truth = std::move(train.pulses);
    t.dc = std::move(bg.dc);
    t.background = std::move(bg.sinusoid);
    t.background_phase = bg.phase;
    t.white_noise = std::move(nz.white);
    t.interferers = std::move(nz.interferers);
    t.interferer_phases = std::move(nz.phases);
    return t;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// A preset filter prepared for detection: design, bank and transform.
struct DetectorBank {
    Preset preset;
    DesignedFilter filter;
    OrthoTransform transform;
    HypothesisMask mask;
};

inline DetectorBank prepare_bank(Preset preset, std::size_t length, std::size_t terms) {
    auto filter = design_preset(preset, length, terms, 0);
    auto transform = build_ortho_transform(filter.operators().psi, filter.operators().weight.w);
    return {preset, std::move(filter), std::move(transform), HypothesisMask::quadratic_pulse(terms)};
}

struct FilterRun {
    Preset preset;
    AlignedSeries smoothed;
    DetectionReport report;
    std::vector<bool> pulse_detected; ///< any event within pulse support +- K
};

inline FilterRun run_filter(const ScenarioTrace& trace, const DetectorBank& bank, const DetectorConfig& config) {
    const SampleSequence x(trace.composite);
    FilterRun run{bank.preset, convolve(x, bank.filter.taps()), {}, {}};
    const auto features = run_bank(x, bank.filter.operators().analysis);
    run.report = detect(features, bank.transform, bank.mask, config, trace.extents());
    const std::size_t k = features.first_index;
    for (const auto& p : trace.truth) {
        const std::size_t lo = p.extent.first > k ? p.extent.first - k : 0;
        const std::size_t hi = p.extent.last + k;
        const bool hit = std::any_of(run.report.events.begin(), run.report.events.end(),
                                     [&](std::size_t n) { return n >= lo && n <= hi; });
        run.pulse_detected.push_back(hit);
    }
    return run;
}

struct ExperimentConfig {
    ScenarioTag tag = ScenarioTag::LowWhite;
    std::vector<Preset> presets{kAllPresets.begin(), kAllPresets.end()};
    std::size_t length = 17;
    std::size_t terms = 5;
    DetectorConfig detector{};
    std::vector<std::uint64_t> seeds{};
    double amplitude = 10.0;
    std::size_t gap = 0;
    bool white_noise_in_colored = false;
};

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
    return s;
}

struct SeedRun {
    std::uint64_t seed;
    ScenarioTrace trace;
    std::vector<FilterRun> filters; ///< in config.presets order
};

struct FilterSummary {
    Preset preset;
    std::vector<double> medium_peak_db; ///< per seed
    double median_db = 0.0;
    double q25_db = 0.0;
    double q75_db = 0.0;
    std::vector<double> pulse_detection_rate; ///< per pulse, fraction of seeds
    double any_detection_rate = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<SeedRun> runs;
    std::vector<FilterSummary> summaries; ///< in config.presets order

    const FilterSummary& summary(Preset p) const {
        for (const auto& s : summaries)
            if (s.preset == p) return s;
        throw ValidationError(std::string("preset ") + to_char(p) + " not part of this experiment");
    }
};

/// Linear-interpolated quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
    detail::require(!v.empty(), "quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

inline ScenarioSpec scenario_for(const ExperimentConfig& config, std::uint64_t seed) {
    ScenarioSpec s;
    s.tag = config.tag;
    s.seed = seed;
    s.amplitude = config.amplitude;
    s.length = config.length;
    s.gap = config.gap;
    s.white_noise_in_colored = config.white_noise_in_colored;
    return s;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<DetectorBank>& banks) {
    detail::require(!config.seeds.empty(), "experiment needs at least one seed");
    ExperimentResult result{config, {}, {}};
    std::vector<const DetectorBank*> selected;
    for (auto p : config.presets) {
        auto it = std::find_if(banks.begin(), banks.end(), [p](const DetectorBank& b) { return b.preset == p; });
        detail::require(it != banks.end(), std::string("no prepared bank for preset ") + to_char(p));
        detail::require(static_cast<std::size_t>(it->filter.spec().length) == config.length,
                        "prepared bank length differs from experiment M");
        selected.push_back(&*it);
    }
    for (auto seed : config.seeds) {
        SeedRun run{seed, build_trace(scenario_for(config, seed)), {}};
        for (const auto* bank : selected) run.filters.push_back(run_filter(run.trace, *bank, config.detector));
        result.runs.push_back(std::move(run));
    }
    const double seeds = static_cast<double>(config.seeds.size());
    for (std::size_t f = 0; f < selected.size(); ++f) {
        FilterSummary s{selected[f]->preset, {}, 0.0, 0.0, 0.0, {}, 0.0};
        std::size_t pulses = result.runs.front().trace.truth.size();
        s.pulse_detection_rate.assign(pulses, 0.0);
        for (const auto& run : result.runs) {
            const auto& fr = run.filters[f];
            s.medium_peak_db.push_back(fr.report.peak_snr_db.at(kMediumPulse));
            for (std::size_t p = 0; p < pulses; ++p) s.pulse_detection_rate[p] += fr.pulse_detected[p] ? 1.0 : 0.0;
            s.any_detection_rate += fr.report.events.empty() ? 0.0 : 1.0;
        }
        for (auto& r : s.pulse_detection_rate) r /= seeds;
        s.any_detection_rate /= seeds;
        s.median_db = median(s.medium_peak_db);
        s.q25_db = quantile(s.medium_peak_db, 0.25);
        s.q75_db = quantile(s.medium_peak_db, 0.75);
        result.summaries.push_back(std::move(s));
    }
    return result;
}

inline std::vector<DetectorBank> prepare_banks(const std::vector<Preset>& presets, std::size_t length,
                                               std::size_t terms) {
    std::vector<DetectorBank> banks;
    for (auto p : presets) banks.push_back(prepare_bank(p, length, terms));
    return banks;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, prepare_banks(config.presets, config.length, config.terms));
}

/// Filter A low-white medium-pulse peak SNR that anchors the amplitude scale.
inline constexpr double kCalibrationTargetDb = 28.5;
inline constexpr double kCalibrationToleranceDb = 1.0;

struct Calibration {
    double amplitude;
    double median_db; ///< achieved Filter A low-white medium-pulse median
};

/// Bisects the pulse amplitude (in log scale) until Filter A's median
/// low-white medium-pulse peak SNR is within tolerance of the target.
inline Calibration calibrate_amplitude(const ExperimentConfig& base, double target_db = kCalibrationTargetDb,
                                       double tolerance_db = kCalibrationToleranceDb) {
    ExperimentConfig cfg = base;
    cfg.tag = ScenarioTag::LowWhite;
    cfg.presets = {Preset::A};
    const std::vector<DetectorBank> banks{prepare_bank(Preset::A, cfg.length, cfg.terms)};
    auto measure = [&](double amplitude) {
        cfg.amplitude = amplitude;
        return run_experiment(cfg, banks).summaries.front().median_db;
    };
    double lo = std::log(1e-2), hi = std::log(1e4);
    double best_amp = std::exp(0.5 * (lo + hi));
    double best_db = measure(best_amp);
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double amp = std::exp(mid);
        const double db = measure(amp);
        if (std::abs(db - target_db) < std::abs(best_db - target_db)) {
            best_amp = amp;
            best_db = db;
        }
        if (std::abs(db - target_db) <= 0.05 * tolerance_db) break;
        (db < target_db ? lo : hi) = mid;
    }
    if (std::abs(best_db - target_db) > tolerance_db)
        throw NumericalError("amplitude calibration did not reach the target peak SNR");
    return {best_amp, best_db};
}

/// Medium-pulse median peak SNR, rows = scenarios, columns = presets.
struct PeakSnrTable {
    std::vector<ScenarioTag> scenarios;
    std::vector<Preset> presets;
    std::vector<std::vector<double>> median_db;
};

inline PeakSnrTable make_table(const std::vector<ExperimentResult>& rows) {
    PeakSnrTable t;
    if (rows.empty()) return t;
    t.presets = rows.front().config.presets;
    for (const auto& r : rows) {
        t.scenarios.push_back(r.config.tag);
        std::vector<double> row;
        for (auto p : t.presets) row.push_back(r.summary(p).median_db);
        t.median_db.push_back(std::move(row));
    }
    return t;
}

} // namespace csg
