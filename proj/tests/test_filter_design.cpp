// SPDX-License-Identifier: Apache-2.0
#include "csg/filter_design.hpp"
#include "csg/presets.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace csg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

oracle::Mat to_oracle(const Matrix& a) {
    oracle::Mat o = oracle::zeros(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) o[i][j] = a(i, j);
    return o;
}

double max_rel_diff(const Vector& a, const oracle::Vec& b) {
    double scale = 0.0, diff = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(b[i]));
        diff = std::max(diff, std::abs(a(i) - b[i]));
    }
    return diff / scale;
}

} // namespace

TEST_CASE("Vandermonde and operators") {
    const auto psi = build_vandermonde(5, 3);
    CHECK(psi(0, 1) == -2.0);
    CHECK(psi(0, 2) == 4.0);
    CHECK(psi(2, 0) == 1.0);
    const auto d2 = derivative_operator(4, 2, 0.5);
    CHECK(d2(0, 2) == 2.0 * 4.0);
    CHECK(d2(1, 3) == 6.0 * 4.0);
    CHECK(moment_vector(3) == Vector::Unit(3, 0));
}

TEST_CASE("plain smoother equals the brute-force fit") {
    const auto f = design({17, 5, 0, {noise::White{}, 1.0}});
    const auto fit = oracle::weighted_fit(oracle::identity(17), 5);
    CHECK(max_rel_diff(f.window_weights(), oracle::derivative_window(fit, 0)) < 1e-12);
    CHECK_THAT(f.diagnostics().white_noise_gain, WithinAbs(0.2103, 5e-4));
}

TEST_CASE("first-derivative taps for M = 5, L = 3") {
    const auto f = design({5, 3, 1, {noise::White{}, 1.0}});
    // window order: weights on x[n-2..n+2]
    const Vector expect = (Vector(5) << -2, -1, 0, 1, 2).finished() / 10.0;
    CHECK((f.window_weights() - expect).cwiseAbs().maxCoeff() < 1e-14);
    // convolution order reverses them
    CHECK_THAT(f.tap(-2), WithinAbs(0.2, 1e-14));
}

TEST_CASE("second-derivative taps are twice row 2 of H") {
    const auto f = design({7, 3, 2, {noise::White{}, 1.0}});
    const Vector row2 = f.operators().analysis.row(2).transpose();
    CHECK((f.window_weights() - 2.0 * row2).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("sample period scales derivative taps") {
    const auto a = design({9, 4, 1, {noise::White{}, 1.0}});
    const auto b = design({9, 4, 1, {noise::White{}, 0.25}});
    CHECK((b.taps() - 4.0 * a.taps()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kernel-weighted designs match the oracle fit") {
    const double lambda = 3.0 / preset_cutoff(17, 5);
    auto w = oracle::identity(17);
    for (int i = 0; i < 17; ++i) w[i][i] = std::exp(-double((i - 8) * (i - 8)) / (2 * lambda * lambda));
    const auto f = design_preset(Preset::B, 17, 5);
    CHECK(max_rel_diff(f.window_weights(), oracle::derivative_window(oracle::weighted_fit(w, 5), 0)) < 1e-10);
}

TEST_CASE("both solvers agree with the bordered oracle for correlated noise") {
    for (auto p : {Preset::C, Preset::F}) {
        const auto spec = preset_noise(p, 17, 5);
        const auto r = *noise_covariance(spec, 17);
        const auto expect = oracle::bordered_taps(to_oracle(r), 5);
        const auto ls = design({17, 5, 0, spec}, "x", SolveRoute::WeightedLeastSquares);
        const auto kkt = design({17, 5, 0, spec}, "x", SolveRoute::BorderedKkt);
        CHECK(max_rel_diff(ls.window_weights(), expect) < 1e-9);
        CHECK(max_rel_diff(kkt.window_weights(), expect) < 1e-9);
    }
}

TEST_CASE("analysis matrix inverts the regression") {
    for (auto p : kAllPresets) {
        const auto f = design_preset(p, 17, 5);
        const Matrix hp = f.operators().analysis * f.operators().psi;
        CHECK((hp - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("preset routes and diagnostics") {
    CHECK(design_preset(Preset::A, 17, 5).diagnostics().route == SolveRoute::WeightedLeastSquares);
    CHECK(design_preset(Preset::D, 17, 5).diagnostics().route == SolveRoute::BorderedKkt);
    CHECK(design_preset(Preset::E, 17, 5).diagnostics().route == SolveRoute::BorderedKkt);
    CHECK(design_preset(Preset::F, 17, 5).diagnostics().route == SolveRoute::WeightedLeastSquares);
    CHECK_THAT(preset_cutoff(17, 5), WithinAbs(0.6884, 2e-4));
}

TEST_CASE("too many narrow-band poles are rejected") {
    PresetOverrides o;
    o.frequencies = std::vector<double>{0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.1, 2.4, 2.7};
    CHECK_THROWS_AS(design_preset(Preset::E, 17, 5, 0, o), ValidationError);
    o.frequencies = std::vector<double>{0.3, 0.9, 1.5, 2.1, 2.7, 3.0};
    CHECK_NOTHROW(design_preset(Preset::E, 17, 5, 0, o));
    o.frequencies->push_back(1.0);
    CHECK_THROWS_AS(design_preset(Preset::E, 17, 5, 0, o), ValidationError);
}

TEST_CASE("design preconditions") {
    CHECK_THROWS_AS(design({16, 5, 0, {noise::White{}, 1.0}}), ValidationError);
    CHECK_THROWS_AS(design({17, 5, 5, {noise::White{}, 1.0}}), ValidationError);
    CHECK_THROWS_AS(design({5, 7, 0, {noise::White{}, 1.0}}), ValidationError);
    CHECK_THROWS_AS(parse_preset("G"), ValidationError);
}

TEST_CASE("designs are immutable values safe to copy") {
    const auto a = design_preset(Preset::A, 17, 5);
    const auto b = a;
    CHECK(a.taps() == b.taps());
    CHECK(a.label() == "A");
}
