#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "sps/evolution.hpp"
#include "sps/initial.hpp"

namespace {

std::size_t freq_index(int n, int a, int b, int c) {
    auto w = [n](int k) { return static_cast<std::size_t>((k % n + n) % n); };
    return (w(a) * n + w(b)) * n + w(c);
}

sps::EvolutionParams params(double eps, double alpha, double dt, double t_end) {
    sps::EvolutionParams p;
    p.epsilon = eps;
    p.alpha = alpha;
    p.dt = dt;
    p.t_end = t_end;
    return p;
}

}  // namespace

TEST(LinearSymbol, UnitaryWithoutDissipation) {
    const sps::Grid3 g(16, 7.0);
    const auto s = sps::linear_half_step_symbol(g, params(0.0, 0.5, 0.1, 1.0));
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(std::abs(s[i]), 1.0, 1e-15);
}

TEST(LinearSymbol, ZeroModeMasslessIsOne) {
    const sps::Grid3 g(8, 3.0);
    auto p = params(0.5, 0.5, 0.1, 1.0);
    p.mass = 0.0;
    EXPECT_EQ(sps::linear_half_step_symbol(g, p)[0], sps::cplx(1.0));
}

TEST(LinearSymbol, DampingModulus) {
    const sps::Grid3 g(8, 2.0 * std::numbers::pi);
    const auto s = sps::linear_half_step_symbol(g, params(1.0, 0.5, 0.2, 1.0));
    EXPECT_NEAR(std::abs(s[freq_index(8, 0, 1, 0)]), std::exp(-0.1), 1e-15);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(std::abs(s[i]), 1.0);
}

TEST(Params, Validation) {
    const sps::Grid3 g(8, 3.0);
    EXPECT_THROW(params(-0.1, 0.5, 0.1, 1.0).validate(g), std::invalid_argument);
    EXPECT_THROW(params(0.0, 0.4, 0.1, 1.0).validate(g), std::invalid_argument);
    EXPECT_THROW(params(0.0, 0.5, 2.0, 1.0).validate(g), std::invalid_argument);
}

TEST(Step, ZeroStateStaysZero) {
    const sps::Grid3 g(16, 8.0);
    sps::MixedState s({sps::Field(g)}, {1.0});
    sps::Propagator(g, params(0.1, 0.5, 0.01, 1.0)).step(s);
    EXPECT_EQ(sps::norm2(s[0]), 0.0);
}

TEST(Step, PlaneWaveKeepsModulus) {
    const sps::Grid3 g(16, 8.0);
    const auto w = sps::plane_wave(g, {1, 2, 0});
    sps::MixedState s({w}, {1.0});
    auto p = params(0.0, 0.5, 0.05, 1.0);
    p.kernel = sps::PeriodicKernel{};
    sps::Propagator(g, p).advance(s, 10);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(s[0][i]), std::abs(w[i]), 1e-13);
}

TEST(Step, GaussianMassPerStep) {
    const sps::Grid3 g(32, 16.0);
    sps::MixedState s({1.5 * sps::gaussian_field(g, 1.0)}, {1.0});
    auto p = params(0.0, 0.5, 0.01, 1.0);
    p.kernel = sps::default_kernel(g);
    const sps::Propagator prop(g, p);
    double before = sps::weighted_mass(s);
    for (int i = 0; i < 5; ++i) {
        prop.step(s);
        const double after = sps::weighted_mass(s);
        EXPECT_LE(std::abs(after - before) / before, 1e-13);
        before = after;
    }
}

TEST(Step, LinearOnlyMatchesExactFlow) {
    const sps::Grid3 g(16, 8.0);
    sps::MixedState s({sps::gaussian_field(g, 1.0), sps::plane_wave(g, {0, 1, 3})}, {1.0, 0.5});
    auto p = params(0.2, 0.75, 0.02, 1.0);
    p.linear_only = true;
    const auto exact = sps::exact_linear_flow(s, p, 0.02);
    sps::Propagator(g, p).step(s);
    EXPECT_LT(sps::weighted_distance(s, exact) / std::sqrt(sps::weighted_mass(exact)), 1e-12);
}

TEST(Step, NonFiniteRaisesSentinel) {
    const sps::Grid3 g(8, 4.0);
    auto f = sps::gaussian_field(g, 1.0);
    f[3] = std::numeric_limits<double>::quiet_NaN();
    sps::MixedState s({f}, {1.0});
    EXPECT_THROW(sps::Propagator(g, params(0.0, 0.5, 0.01, 1.0)).step(s), sps::BlowupSignal);
}

TEST(Evolve, NonFiniteDataEndsWithBlowupStatus) {
    const sps::Grid3 g(8, 4.0);
    auto f = sps::gaussian_field(g, 1.0);
    f[0] = std::numeric_limits<double>::infinity();
    const sps::MixedState s({f}, {1.0});
    sps::Observers obs;
    obs.record_stride = 1;
    const auto tr = sps::evolve(s, params(0.0, 0.5, 0.01, 0.1), obs);
    EXPECT_EQ(tr.status, sps::RunStatus::BlowupDetected);
}

TEST(Evolve, DissipativeMassIsNonIncreasing) {
    const sps::Grid3 g(32, 16.0);
    const sps::MixedState s({2.0 * sps::gaussian_field(g, 1.0, {}, true)}, {1.0});
    auto p = params(0.1, 0.5, 0.01, 0.5);
    p.kernel = sps::default_kernel(g);
    sps::Observers obs;
    obs.record_stride = 1;
    const auto tr = sps::evolve(s, p, obs);
    ASSERT_EQ(tr.status, sps::RunStatus::Completed);
    for (std::size_t i = 1; i < tr.records.size(); ++i)
        EXPECT_LE(tr.records[i].total_mass, tr.records[i - 1].total_mass * (1.0 + 1e-14));
    const double lost = tr.records.front().total_mass - tr.records.back().total_mass;
    EXPECT_NEAR(lost, tr.records.back().ledger, 0.01 * tr.records.front().total_mass);
}

TEST(Evolve, ConservativeGramStaysIdentity) {
    const sps::Grid3 g(32, 16.0);
    const sps::InitialRecipe r{sps::RadialGaussianStack{{1.0, 1.5}}, {1.0, 0.5}, true};
    const auto s = sps::build_initial_state(g, r);
    auto p = params(0.0, 0.5, 0.01, 0.5);
    p.kernel = sps::default_kernel(g);
    sps::Observers obs;
    const auto tr = sps::evolve(s, p, obs);
    EXPECT_LT(sps::gram_matrix(*tr.final_state).max_deviation_from_identity(), 1e-8);
}

TEST(Convergence, LinearOnlyIsExactAtEveryDt) {
    const sps::Grid3 g(16, 8.0);
    const sps::MixedState s({sps::gaussian_field(g, 1.0)}, {1.0});
    auto p = params(0.1, 0.5, 0.01, 0.4);
    p.linear_only = true;
    const auto res = sps::convergence_study(s, p, {0.1, 0.05, 0.025});
    for (const auto& row : res.rows) EXPECT_LT(row.error, 1e-12);
}

TEST(Convergence, StrangIsSecondOrder) {
    const sps::Grid3 g(32, 16.0);
    const sps::MixedState s({1.5 * sps::gaussian_field(g, 1.0)}, {1.0});
    auto p = params(0.0, 0.5, 0.01, 0.4);
    p.kernel = sps::default_kernel(g);
    const auto res = sps::convergence_study(s, p, {0.04, 0.02, 0.01});
    EXPECT_GE(res.order, 1.8);
    EXPECT_LE(res.order, 2.2);
    p.epsilon = 0.1;
    EXPECT_GE(sps::convergence_study(s, p, {0.04, 0.02, 0.01}).order, 1.8);
}
