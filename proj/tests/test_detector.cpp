// SPDX-License-Identifier: Apache-2.0
#include "csg/detector.hpp"
#include "csg/presets.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace csg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Vector random_alpha(std::mt19937& g) {
    std::normal_distribution<double> d;
    Vector a(5);
    for (int i = 0; i < 5; ++i) a(i) = d(g);
    return a;
}

FeatureSeries series_of(const std::vector<Vector>& cols) {
    FeatureSeries f{8, Matrix(5, static_cast<Eigen::Index>(cols.size()))};
    for (std::size_t j = 0; j < cols.size(); ++j) f.coefficients.col(j) = cols[j];
    return f;
}

} // namespace

TEST_CASE("masks") {
    const auto m = HypothesisMask::quadratic_pulse(5);
    const Vector a = (Vector(5) << 1, 2, 3, 4, 5).finished();
    CHECK(m.foreground(a) == (Vector(5) << 0, 0, 3, 0, 0).finished());
    CHECK(m.background(a) == (Vector(5) << 0, 2, 0, 4, 5).finished());
    CHECK_THROWS_AS(HypothesisMask::quadratic_pulse(2), ValidationError);
    CHECK_THROWS_AS(HypothesisMask(5, {5}, {}), ValidationError);
}

TEST_CASE("identity chain: |U alpha|^2 equals S^T W_s S") {
    std::mt19937 g(4);
    for (auto p : kAllPresets) {
        const auto f = design_preset(p, 17, 5);
        const auto t = build_ortho_transform(f.operators().psi, f.operators().weight.w);
        CHECK(t.scaled_weight.maxCoeff() == 1.0);
        CHECK((t.upper.triangularView<Eigen::StrictlyLower>().toDenseMatrix()).cwiseAbs().maxCoeff() == 0.0);
        for (int trial = 0; trial < 5; ++trial) {
            const Vector a = random_alpha(g);
            const Vector s = synthesize(a, f.operators().psi);
            const double lhs = (t.upper * a).squaredNorm();
            const double rhs = s.dot(t.scaled_weight * s);
            CHECK_THAT(lhs, WithinRel(rhs, 1e-8));
        }
    }
}

TEST_CASE("a non positive definite weight is rejected") {
    const Matrix psi = Matrix::Ones(3, 2);
    CHECK_THROWS_AS(build_ortho_transform(psi, Matrix::Identity(3, 3)), NumericalError);
    CHECK_THROWS_AS(build_ortho_transform(build_vandermonde(3, 2), -Matrix::Identity(3, 3)), NumericalError);
}

TEST_CASE("statistic is sign independent and grows with epsilon shrinking") {
    std::mt19937 g(9);
    const auto f = design_preset(Preset::E, 17, 5);
    const auto t = build_ortho_transform(f.operators().psi, f.operators().weight.w);
    const auto mask = HypothesisMask::quadratic_pulse(5);
    std::vector<Vector> pos, neg;
    for (int i = 0; i < 20; ++i) {
        pos.push_back(random_alpha(g));
        neg.push_back(-pos.back());
    }
    const auto zp = compute_statistic(series_of(pos), t, mask);
    const auto zn = compute_statistic(series_of(neg), t, mask);
    CHECK(zp.z == zn.z);
    const auto loose = compute_statistic(series_of(pos), t, mask, 1e-1);
    for (std::size_t j = 0; j < zp.size(); ++j) CHECK(loose.z[j] <= zp.z[j]);
    CHECK_THROWS_AS(compute_statistic(series_of(pos), t, mask, 0.0), ValidationError);
}

TEST_CASE("pure quadratic content gives Z = power / eps") {
    const auto f = design_preset(Preset::A, 17, 5);
    const auto t = build_ortho_transform(f.operators().psi, f.operators().weight.w);
    const Vector a = (Vector(5) << 7, 0, 0.3, 0, 0).finished();
    const auto z = compute_statistic(series_of({a}), t, HypothesisMask::quadratic_pulse(5));
    const double power = (t.upper * Vector::Unit(5, 2) * 0.3).squaredNorm();
    CHECK_THAT(z.z[0], WithinRel(power / kDefaultEpsilon, 1e-12));
}

TEST_CASE("thresholding and run collapsing") {
    StatisticSeries s{10, {1.0, 200.0, 500.0, 150.0, 1.0, 1000.0}};
    CHECK(threshold_detect(s, 20.0) == std::vector<std::size_t>{11, 12, 13, 15});
    CHECK(threshold_detect(s, 20.0, true) == std::vector<std::size_t>{12, 15});
    CHECK(threshold_detect(s, 40.0).empty());
    CHECK(power_db(0.0) == -300.0);
    CHECK_THAT(power_db(100.0), WithinAbs(20.0, 1e-14));
}

TEST_CASE("peak SNR searches the widened support") {
    StatisticSeries s{8, std::vector<double>(30, 1.0)};
    s.z[20 - 8] = 1000.0; // sample 20
    CHECK_THAT(peak_snr(s, {{24, 26}}, 4)[0], WithinAbs(30.0, 1e-12));
    CHECK_THAT(peak_snr(s, {{25, 26}}, 4)[0], WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(peak_snr(s, {{100, 110}}, 4), ValidationError);
}
