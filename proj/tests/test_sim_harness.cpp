// SPDX-License-Identifier: Apache-2.0
#include "csg/sim_harness.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace csg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("uniform and Gaussian draws") {
    ScenarioRng a(1), b(1);
    for (int i = 0; i < 10; ++i) CHECK(a.gaussian() == b.gaussian());
    ScenarioRng r(42);
    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double g = r.gaussian();
        sum += g;
        sum2 += g * g;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK_THAT(sum2 / n, WithinAbs(1.0, 0.01));
    ScenarioRng u(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK((v >= 0.0 && v < 1.0));
    }
}

TEST_CASE("uniform draw uses the top 53 bits") {
    std::mt19937_64 e(7);
    ScenarioRng r(7);
    CHECK(r.uniform() == static_cast<double>(e() >> 11) * 0x1.0p-53);
}

TEST_CASE("pulse train layout") {
    const auto t = gen_pulse_train(10.0, 51);
    REQUIRE(t.pulses.size() == 5);
    CHECK(t.samples.size() == 51 * 6 + 9 + 17 + 33 + 17 + 17);
    const auto& med = t.pulses[kMediumPulse];
    CHECK(med.kind == PulseKind::Quadratic);
    CHECK(med.duration == 17);
    CHECK(med.polarity == -1);
    CHECK(med.extent.first == 51 + 9 + 51);
    CHECK_THAT(t.samples[med.extent.first + 8], WithinAbs(-10.0, 1e-12));
    CHECK(t.samples[med.extent.first] == 0.0);
    CHECK(t.pulses[3].kind == PulseKind::Square);
    CHECK(t.pulses[4].kind == PulseKind::Sawtooth);
    CHECK(t.pulses[4].polarity == 1);
    CHECK(t.samples[t.pulses[3].extent.first] == -10.0);
}

TEST_CASE("trace components add up and are reproducible") {
    ScenarioSpec s;
    s.tag = ScenarioTag::MatchedColored;
    s.seed = 5;
    const auto a = build_trace(s), b = build_trace(s);
    CHECK(a.composite == b.composite);
    for (std::size_t n = 0; n < a.size(); ++n)
        CHECK(a.composite[n] ==
              a.pulses[n] + a.dc[n] + a.background[n] + a.white_noise[n] + a.interferers[n]);
    for (double w : a.white_noise) CHECK(w == 0.0);
    REQUIRE(a.interferer_phases.size() == 2);
    s.seed = 6;
    CHECK(build_trace(s).composite != a.composite);
    s.white_noise_in_colored = true;
    const auto c = build_trace(s);
    CHECK(std::any_of(c.white_noise.begin(), c.white_noise.end(), [](double v) { return v != 0.0; }));
}

TEST_CASE("white scenarios have the stated sigma") {
    ScenarioSpec s;
    s.tag = ScenarioTag::HighWhite;
    s.gap = 4000;
    const auto t = build_trace(s);
    double sum2 = 0;
    for (double w : t.white_noise) sum2 += w * w;
    CHECK_THAT(std::sqrt(sum2 / double(t.size())), WithinRel(0.2, 0.03));
    for (double v : t.interferers) CHECK(v == 0.0);
}

TEST_CASE("noise-free medium pulse peak is stable") {
    // Frozen reference: preset A, M = 17, L = 5, amplitude 10 mV, no noise and
    // no background, so the statistic depends only on the pulse shape.
    const auto bank = prepare_bank(Preset::A, 17, 5);
    const auto train = gen_pulse_train(10.0, 51);
    const SampleSequence x(train.samples);
    const auto features = run_bank(x, bank.filter.operators().analysis);
    const auto report = detect(features, bank.transform, bank.mask, {}, {train.pulses[kMediumPulse].extent});
    CHECK_THAT(report.peak_snr_db[0], WithinAbs(56.317686707016932, 1e-9));
    CHECK_FALSE(report.events.empty());
}

TEST_CASE("experiment summaries and quantiles") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(quantile({0.0, 10.0}, 0.25) == 2.5);
    ExperimentConfig cfg;
    cfg.seeds = seed_range(1, 3);
    cfg.presets = {Preset::A, Preset::E};
    const auto r = run_experiment(cfg);
    REQUIRE(r.summaries.size() == 2);
    CHECK(r.summary(Preset::E).medium_peak_db.size() == 3);
    CHECK_THROWS_AS(r.summary(Preset::B), ValidationError);
    const auto table = make_table({r});
    CHECK(table.median_db[0][1] == r.summary(Preset::E).median_db);
}

TEST_CASE("scenario tags") {
    CHECK(parse_scenario("mismatched-colored") == ScenarioTag::MismatchedColored);
    CHECK_THROWS_AS(parse_scenario("pink"), ValidationError);
}

TEST_CASE("M = 33 banks run the same scenarios") {
    ExperimentConfig cfg;
    cfg.length = 33;
    cfg.seeds = seed_range(1, 4);
    cfg.amplitude = 9.6;
    const auto r = run_experiment(cfg);
    // only the 33-sample pulse fits the longer window
    for (const auto& s : r.summaries) CHECK(s.pulse_detection_rate[2] >= 0.5);
}
