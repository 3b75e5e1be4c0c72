#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sps/initial.hpp"
#include "sps/semigroup_lab.hpp"

namespace {

double rel_l2(const sps::Field& a, const sps::Field& b) { return std::sqrt(sps::norm2(a - b) / sps::norm2(b)); }

}  // namespace

TEST(Heat, TimeZeroIsIdentity) {
    const sps::Grid3 g(16, 8.0);
    const auto f = sps::gaussian_field(g, 0.7, {0.3, 0.0, -0.2});
    EXPECT_LT(rel_l2(sps::heat_semigroup_apply(f, 0.0, 0.75), f), 1e-14);
}

TEST(Heat, PlaneWaveEigenfunction) {
    const sps::Grid3 g(16, 2.0 * std::numbers::pi);
    const auto w = sps::plane_wave(g, {1, 2, 2});
    const double t = 0.1, alpha = 0.75;
    const auto out = sps::heat_semigroup_apply(w, t, alpha);
    EXPECT_LT(rel_l2(out, std::exp(-t * std::pow(3.0, 2.0 * alpha)) * w), 1e-12);
}

TEST(Heat, GaussianWidthGrowsLinearly) {
    const sps::Grid3 g(64, 32.0);
    const double s0 = 1.0, t = 0.8;
    const auto out = sps::heat_semigroup_apply(sps::unit_mass_gaussian(g, s0), t, 1.0);
    const auto expected = sps::unit_mass_gaussian(g, std::sqrt(s0 * s0 + 2.0 * t));
    EXPECT_LT(rel_l2(out, expected), 1e-10);
}

TEST(Heat, SemigroupAndContraction) {
    const sps::Grid3 g(32, 16.0);
    const auto f = sps::gaussian_field(g, 0.5, {1.0, -1.0, 0.0});
    const auto two = sps::heat_semigroup_apply(sps::heat_semigroup_apply(f, 0.3, 0.5), 0.5, 0.5);
    EXPECT_LT(rel_l2(two, sps::heat_semigroup_apply(f, 0.8, 0.5)), 1e-12);
    for (double t : {0.01, 0.1, 1.0}) {
        const auto u = sps::heat_semigroup_apply(f, t, 0.5);
        EXPECT_LE(sps::norm2(u), sps::norm2(f));
        EXPECT_LE(sps::lp_norm(u, sps::kInf), sps::lp_norm(f, sps::kInf) * (1.0 + 1e-12));
    }
}

TEST(DecayFit, PredictedSlopes) {
    EXPECT_DOUBLE_EQ(sps::predicted_decay_slope(1.0, 0.0, 1.0, sps::kInf), -1.5);
    EXPECT_DOUBLE_EQ(sps::predicted_decay_slope(0.5, 0.0, 2.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(sps::predicted_decay_slope(0.5, 1.0, 2.0, 2.0), -1.0);
}

TEST(DecayFit, HeatKernelPointSourceOnSmallGrid) {
    const sps::Grid3 g(64, 32.0);
    sps::DecayProbe p;
    p.alpha = 1.0;
    p.r = 1.0;
    p.p = sps::kInf;
    p.box_limit = sps::infrared_box_limit(p.alpha, p.nu, p.r);
    p.t_samples = sps::geometric_times(g.spacing() * g.spacing(), std::pow(0.7 / g.dk(), 2.0), 24);
    const auto fit = sps::decay_exponent_fit(g, p);
    EXPECT_DOUBLE_EQ(fit.predicted_slope, -1.5);
    EXPECT_LT(fit.relative_gap, 0.05);
    EXPECT_GE(fit.used, 5u);
}

TEST(DecayFit, L2ContractionHasFlatSlope) {
    const sps::Grid3 g(64, 32.0);
    sps::DecayProbe p;
    p.alpha = 0.5;
    p.r = 2.0;
    p.p = 2.0;
    p.data = sps::ProbeData::PeakedGaussian;
    const double scale = p.gaussian_sigma_cells * g.spacing();
    p.t_samples = sps::geometric_times(1e-3 * scale, 2e-2 * scale, 16);
    const auto fit = sps::decay_exponent_fit(g, p);
    EXPECT_LE(std::abs(fit.fitted_slope), 0.02);
}

TEST(DecayFit, TooFewSamplesThrows) {
    const sps::Grid3 g(32, 16.0);
    sps::DecayProbe p;
    p.t_samples = {1e3, 2e3, 4e3};
    EXPECT_THROW(sps::decay_exponent_fit(g, p), std::runtime_error);
}

TEST(Triplet, Examples) {
    const auto ok = sps::admissible_triplet_check(sps::kInf, 2.0, 2.0, 0.75);
    EXPECT_TRUE(ok.admissible);
    EXPECT_EQ(ok.failure, "");

    // alpha = 1, r = 2, p = 4: 1/q = 3/8
    const auto good = sps::admissible_triplet_check(8.0 / 3.0, 4.0, 2.0, 1.0);
    EXPECT_TRUE(good.admissible);
    const auto off = sps::admissible_triplet_check(1.1 * 8.0 / 3.0, 4.0, 2.0, 1.0);
    EXPECT_FALSE(off.admissible);
    EXPECT_EQ(off.failure, "scaling");

    // p = 3r/(3 - 2 alpha) = 6 is excluded
    const double inv_q = 1.5 * (0.5 - 1.0 / 6.0);
    const auto edge = sps::admissible_triplet_check(1.0 / inv_q, 6.0, 2.0, 1.0);
    EXPECT_FALSE(edge.admissible);
    EXPECT_EQ(edge.failure, "range");
}

TEST(Duhamel, PredictedExponent) {
    EXPECT_NEAR(sps::predicted_duhamel_exponent(1.0, 0.0, 0.8, 2.0), 1.0 - 3.0 * 0.8 / 4.0, 1e-15);
    EXPECT_NEAR(sps::predicted_duhamel_exponent(0.75, 0.0, 0.55, 2.0), 0.45, 1e-15);
}

TEST(Duhamel, RejectsProbesOutsideHypotheses) {
    const sps::Grid3 g(16, 8.0);
    sps::DuhamelProbe p;
    p.b = 0.2;  // r0 = 0.3 <= 1
    p.T_samples = {0.1, 0.2, 0.4};
    EXPECT_THROW(sps::duhamel_scaling_probe(g, p), std::invalid_argument);
}

TEST(Duhamel, TimeConstantForcingMatchesExponent) {
    const sps::Grid3 g(64, 32.0);
    sps::DuhamelProbe p;
    p.alpha = 1.0;
    p.nu = 0.2;
    p.b = 0.7;
    const double unit = std::pow(g.dk(), -2.0);
    p.T_samples = sps::geometric_times(0.01 * unit, 0.2 * unit, 7);
    const auto fit = sps::duhamel_scaling_probe(g, p);
    EXPECT_LT(fit.relative_gap, 0.10);
}

TEST(Duhamel, VanishesAsWindowShrinks) {
    const sps::Grid3 g(32, 16.0);
    sps::DuhamelProbe p;
    p.alpha = 1.0;
    p.nu = 0.2;
    p.b = 0.7;
    p.T_samples = {1e-4, 1e-3, 1e-2};
    const auto fit = sps::duhamel_scaling_probe(g, p);
    EXPECT_LT(fit.samples[0].sup_norm, fit.samples[1].sup_norm);
    EXPECT_LT(fit.samples[1].sup_norm, fit.samples[2].sup_norm);
    EXPECT_LT(fit.samples[0].sup_norm, 0.05 * fit.samples[2].sup_norm);
}

TEST(Duhamel, SmallBLimitGrowsLinearly) {
    const sps::Grid3 g(64, 32.0);
    sps::DuhamelProbe p;
    p.alpha = 1.0;
    p.b = 0.02;
    p.enforce_hypotheses = false;
    const double unit = std::pow(g.dk(), -2.0);
    p.T_samples = sps::geometric_times(1e-3 * unit, 2e-2 * unit, 7);
    const auto fit = sps::duhamel_scaling_probe(g, p);
    EXPECT_NEAR(fit.fitted_exponent, 1.0, 0.10);
}

TEST(Hardy, ZeroFieldReturnsZero) {
    const sps::Grid3 g(16, 8.0);
    EXPECT_EQ(sps::hardy_probe(sps::Field(g), 1.0), 0.0);
    EXPECT_THROW(sps::hardy_probe(sps::Field(g), 3.0), std::invalid_argument);
}

TEST(Hardy, DilationInvariance) {
    const sps::Grid3 g(128, 32.0);
    const double base = sps::hardy_probe(sps::gaussian_field(g, 2.0), 1.0);
    EXPECT_TRUE(std::isfinite(base));
    EXPECT_GT(base, 0.0);
    for (double lambda : {2.0, 4.0}) {
        const double r = sps::hardy_probe(sps::gaussian_field(g, 2.0 / lambda), 1.0);
        EXPECT_NEAR(r / base, 1.0, 0.05) << "lambda " << lambda;
    }
}
