// SPDX-License-Identifier: Apache-2.0
#include "csg/presets.hpp"
#include "csg/response.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace csg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
Vector moving_average(int m) { return Vector::Constant(m, 1.0 / m); }
} // namespace

TEST_CASE("moving average response") {
    const auto h = moving_average(5);
    CHECK_THAT(white_noise_gain(h), WithinRel(0.2, 1e-15));
    CHECK(std::abs(response_at(h, 2 * std::numbers::pi / 5)) < 1e-15);
    CHECK_THAT(*first_null_frequency(h), WithinAbs(2 * std::numbers::pi / 5, 1e-10));
    CHECK_THAT(*first_null_by_grid(h), WithinAbs(2 * std::numbers::pi / 5, 1e-8));
}

TEST_CASE("grid endpoints and dB clamp") {
    const auto pts = frequency_response(moving_average(5), 2);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].omega == 0.0);
    CHECK(pts[1].omega == std::numbers::pi);
    CHECK(magnitude_db(0.0) == kDbFloor);
    CHECK(magnitude_db(1e-200) == kDbFloor);
    CHECK_THAT(magnitude_db(0.1), WithinAbs(-20.0, 1e-12));
    CHECK_THROWS_AS(frequency_response(moving_average(5), 1), ValidationError);
}

TEST_CASE("symmetric taps give a real response") {
    const auto f = design_preset(Preset::F, 17, 5);
    for (const auto& p : frequency_response(f.taps(), 64)) CHECK(std::abs(p.value.imag()) < 1e-14);
    CHECK_THAT(std::abs(response_at(f.taps(), 0.0)), WithinAbs(1.0, 1e-12));
}

TEST_CASE("root and grid estimates of the first null agree") {
    for (auto [m, l] : {std::pair{9, 3}, std::pair{17, 5}, std::pair{33, 5}}) {
        const auto f = design({std::size_t(m), std::size_t(l), 0, {noise::White{}, 1.0}});
        const auto roots = first_null_by_roots(f.taps());
        const auto grid = first_null_by_grid(f.taps());
        REQUIRE(roots);
        REQUIRE(grid);
        CHECK_THAT(*roots, WithinAbs(*grid, 1e-4));
    }
}

TEST_CASE("Parseval against trapezoid quadrature") {
    for (auto p : kAllPresets) {
        const auto f = design_preset(p, 17, 5);
        const oracle::Vec h(f.taps().data(), f.taps().data() + f.taps().size());
        CHECK_THAT(white_noise_gain(f.taps()), WithinRel(oracle::parseval_integral(h, 4096), 1e-6));
    }
}

TEST_CASE("cutoff heuristic") {
    CHECK_THAT(cutoff_heuristic(0.9179), WithinAbs(0.6884, 1e-4));
    CHECK_THAT(cutoff_heuristic(std::numbers::pi), WithinAbs(0.75 * std::numbers::pi, 1e-15));
    CHECK_THROWS_AS(cutoff_heuristic(0.0), ValidationError);
}

TEST_CASE("a lowpass without a null has no first null") {
    const Vector h = (Vector(3) << 0.25, 0.5, 0.25).finished(); // double zero at pi only
    const auto null = first_null_frequency(h);
    REQUIRE(null);
    CHECK_THAT(*null, WithinAbs(std::numbers::pi, 1e-6));
    const Vector g = (Vector(3) << 0.2, 0.6, 0.2).finished(); // zeros off the unit circle
    CHECK_FALSE(first_null_frequency(g));
}
