#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sps/diagnostics.hpp"
#include "sps/evolution.hpp"
#include "sps/initial.hpp"

namespace {

sps::MixedState single(const sps::Field& f) { return sps::MixedState({f}, {1.0}); }

// Real Gaussian times the chirp exp(i mu |x|^2 / 2).
sps::Field chirped_gaussian(const sps::Grid3& g, double sigma, double mu) {
    auto f = sps::gaussian_field(g, sigma);
    const auto& x = g.coord_axis();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto [a, b, c] = g.unflatten(i);
        const double r2 = x[a] * x[a] + x[b] * x[b] + x[c] * x[c];
        f[i] *= std::polar(1.0, 0.5 * mu * r2);
    }
    return f;
}

double second_moment(const sps::Field& f) {
    const auto& g = f.grid();
    const auto& x = g.coord_axis();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto [a, b, c] = g.unflatten(i);
        acc += (x[a] * x[a] + x[b] * x[b] + x[c] * x[c]) * std::norm(f[i]);
    }
    return acc * g.cell_volume();
}

}  // namespace

TEST(Energy, ZeroState) {
    const sps::Grid3 g(16, 8.0);
    const auto e = sps::energy(single(sps::Field(g)), 1.0, sps::default_kernel(g));
    EXPECT_EQ(e.total, 0.0);
    EXPECT_EQ(e.kinetic, 0.0);
    EXPECT_EQ(e.potential, 0.0);
}

TEST(Energy, PlaneWaveMassless) {
    const sps::Grid3 g(16, 8.0);
    const auto e = sps::energy(single(sps::plane_wave(g, {0, 3, 4})), 0.0, sps::PeriodicKernel{});
    EXPECT_NEAR(e.kinetic, 0.5 * 5.0 * g.dk(), 1e-12);
    EXPECT_NEAR(e.potential, 0.0, 1e-14);
}

TEST(Energy, AmplitudeScalingTurnsNegative) {
    const sps::Grid3 g(32, 16.0);
    const auto base = sps::gaussian_field(g, 1.0);
    const auto k = sps::default_kernel(g);
    const auto e1 = sps::energy(single(base), 1.0, k);
    const auto e3 = sps::energy(single(3.0 * base), 1.0, k);
    EXPECT_NEAR(e3.kinetic / e1.kinetic, 9.0, 1e-10);
    EXPECT_NEAR(e3.potential / e1.potential, 81.0, 1e-10);
    EXPECT_GE(e1.kinetic, 0.5 * sps::weighted_mass(single(base)));
    EXPECT_LE(e1.potential, 0.0);
    EXPECT_NEAR(e1.total, e1.kinetic + e1.potential, 1e-15);
    EXPECT_LT(sps::energy(single(6.0 * base), 1.0, k).total, 0.0);
}

TEST(Ledger, TrapezoidAndZeroEpsilon) {
    EXPECT_EQ(sps::dissipation_ledger_update(0.0, 0.0, 0.0, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(sps::dissipation_ledger_update(1.0, 2.0, 4.0, 0.5), 2.5);
}

TEST(Ledger, PlaneWaveMatchesExactMassLoss) {
    // |k0| = 1, alpha = 1/2, eps = 1: mass decays as exp(-2t)
    const sps::Grid3 g(8, 2.0 * std::numbers::pi);
    const auto w = sps::plane_wave(g, {1, 0, 0});
    const sps::DiagnosticsEngine diag(g, 1.0, sps::PeriodicKernel{}, 0.5);
    auto errors = [&](double dt) {
        double ledger = 0.0;
        const double t_end = 1.0;
        const int steps = static_cast<int>(std::lround(t_end / dt));
        for (int s = 0; s < steps; ++s) {
            const double a = std::exp(-(s * dt)), b = std::exp(-((s + 1) * dt));
            const auto before = single(a * w), after = single(b * w);
            ledger = sps::dissipation_ledger_update(ledger, diag.dissipation_rate(before, 1.0),
                                                    diag.dissipation_rate(after, 1.0), dt);
        }
        return std::abs(ledger - (1.0 - std::exp(-2.0 * t_end)));
    };
    const double e1 = errors(0.1), e2 = errors(0.05);
    EXPECT_LT(e1, 1e-2);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1);
}

TEST(Moments, GaussianSecondMomentIsThree) {
    const sps::Grid3 g(64, 32.0);
    const auto s = single(sps::gaussian_field(g, 1.0));
    EXPECT_NEAR(sps::moments(s, 1), 3.0, 1e-8);
    EXPECT_EQ(sps::moments(single(sps::Field(g)), 1), 0.0);
    EXPECT_THROW(sps::moments(s, 3), std::invalid_argument);
}

TEST(Variance, ZeroStateAndLargeMassLimit) {
    const sps::Grid3 g(64, 32.0);
    EXPECT_EQ(sps::variance_m(single(sps::Field(g)), 1.0), 0.0);
    const auto f = sps::gaussian_field(g, 1.0);
    const double m = 100.0;
    const double oracle = m * second_moment(f);
    EXPECT_NEAR(sps::variance_m(single(f), m) / oracle, 1.0, 1e-3);
}

TEST(Variance, TranslationIncreasesM) {
    const sps::Grid3 g(64, 32.0);
    const double centred = sps::variance_m(single(sps::gaussian_field(g, 1.0)), 1.0);
    const double shifted = sps::variance_m(single(sps::gaussian_field(g, 1.0, {1.5, 0.0, -1.0})), 1.0);
    EXPECT_GT(centred, 0.0);
    EXPECT_GT(shifted, centred);
}

TEST(Dilation, RealFieldAndZeroStateVanish) {
    const sps::Grid3 g(32, 16.0);
    EXPECT_NEAR(sps::dilation_a(single(sps::gaussian_field(g, 1.0))), 0.0, 1e-12);
    EXPECT_EQ(sps::dilation_a(single(sps::Field(g))), 0.0);
}

TEST(Dilation, ChirpMatchesMomentOfInertia) {
    const sps::Grid3 g(64, 32.0);
    const double mu = 0.3;
    const auto f = chirped_gaussian(g, 1.0, mu);
    const double expected = mu * second_moment(sps::gaussian_field(g, 1.0));
    EXPECT_NEAR(sps::dilation_a(single(f)) / expected, 1.0, 1e-6);
}

TEST(Rest, BoundsAndLimits) {
    const sps::Grid3 g(16, 8.0);
    const auto wave = single(sps::plane_wave(g, {0, 0, 0}));
    EXPECT_EQ(sps::rest_term(wave, 0.0), 0.0);
    EXPECT_NEAR(sps::rest_term(wave, 1.0), sps::weighted_mass(wave), 1e-12);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    sps::Field f(g);
    for (auto& v : f.values()) v = {nd(rng), nd(rng)};
    const auto s = single(f);
    const double r = sps::rest_term(s, 0.7);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 0.7 * sps::weighted_mass(s));
}

TEST(Record, InvariantsHold) {
    const sps::Grid3 g(32, 16.0);
    const sps::MixedState s({sps::gaussian_field(g, 1.0, {}, true), chirped_gaussian(g, 1.5, 0.1)}, {1.0, 0.5});
    const sps::DiagnosticsEngine diag(g, 1.0, sps::default_kernel(g));
    const auto r = diag.sample(s, 0.0, 0.0);
    EXPECT_GE(r.variance_m, 0.0);
    EXPECT_GE(r.tail_fraction, 0.0);
    EXPECT_LE(r.tail_fraction, 1.0);
    EXPECT_NEAR(r.energy, r.kinetic_part + r.potential_part, 1e-14);
    EXPECT_NEAR(r.total_mass, sps::weighted_mass(s), 1e-14);
    const auto row = sps::to_csv_row(r);
    const auto header = sps::csv_header(2);
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
}

TEST(Monitor, TripsOnRatioAndTail) {
    sps::DiagnosticsRecord r;
    r.h_half = 1.0;
    r.tail_fraction = 0.01;
    const sps::MonitorThresholds th;
    EXPECT_FALSE(sps::blowup_monitor(r, 1.0, th).blowup);
    r.h_half = 51.0;
    EXPECT_TRUE(sps::blowup_monitor(r, 1.0, th).blowup);
    r.h_half = 1.0;
    r.tail_fraction = 0.2;
    const auto v = sps::blowup_monitor(r, 1.0, th);
    EXPECT_TRUE(v.blowup);
    EXPECT_NE(v.reason.find("tail_fraction"), std::string::npos);
}

TEST(Monitor, QuiescentLinearRunContinues) {
    const sps::Grid3 g(16, 8.0);
    const sps::MixedState s({sps::gaussian_field(g, 1.0, {}, true)}, {1.0});
    sps::EvolutionParams p;
    p.linear_only = true;
    p.t_end = 2.0;
    p.dt = 0.05;
    sps::Observers obs;
    obs.record_stride = 1;
    EXPECT_EQ(sps::evolve(s, p, obs).status, sps::RunStatus::Completed);
}
