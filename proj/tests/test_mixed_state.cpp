#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "sps/initial.hpp"
#include "sps/mixed_state.hpp"
#include "sps/spectral.hpp"

namespace {

using sps::cplx;

sps::Field random_field(const sps::Grid3& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    sps::Field f(g);
    for (auto& v : f.values()) v = {nd(rng), nd(rng)};
    return f;
}

sps::MixedState random_state(const sps::Grid3& g, unsigned seed, std::vector<double> w) {
    std::vector<sps::Field> c;
    for (std::size_t k = 0; k < w.size(); ++k) c.push_back(random_field(g, seed + 17 * k));
    return sps::MixedState(std::move(c), std::move(w));
}

}  // namespace

TEST(MixedState, RejectsEmptyOrNonPositiveWeights) {
    const sps::Grid3 g(8, 2.0);
    EXPECT_THROW(sps::MixedState({}, {}), std::invalid_argument);
    EXPECT_THROW(sps::MixedState({sps::Field(g)}, {0.0}), std::invalid_argument);
    EXPECT_THROW(sps::MixedState({sps::Field(g)}, {1.0, 2.0}), std::invalid_argument);
}

TEST(Density, PlaneWaveIsUniform) {
    const sps::Grid3 g(8, 3.0);
    const sps::MixedState s({sps::plane_wave(g, {1, 0, 2})}, {1.0});
    for (double v : sps::density(s)) EXPECT_NEAR(v, 1.0 / 27.0, 1e-15);
}

TEST(Density, OrthonormalPairIntegratesToOne) {
    const sps::Grid3 g(16, 4.0);
    const sps::MixedState s({sps::plane_wave(g, {0, 0, 0}), sps::plane_wave(g, {1, 0, 0})}, {0.5, 0.5});
    EXPECT_NEAR(sps::integrate(g, sps::density(s)), 1.0, 1e-12);
}

TEST(Density, MatchesPointwiseLoop) {
    const sps::Grid3 g(8, 3.0);
    const auto s = random_state(g, 1, {0.2, 0.5, 1.3});
    const auto n = sps::density(s);
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 3; ++k) acc += s.weights()[k] * std::norm(s[k][i]);
        EXPECT_EQ(n[i], acc);
        EXPECT_GE(n[i], 0.0);
        total += acc;
    }
    EXPECT_NEAR(sps::integrate(g, n) / sps::weighted_mass(s), 1.0, 1e-12);
    EXPECT_NEAR(total * g.cell_volume() / sps::weighted_mass(s), 1.0, 1e-12);
}

TEST(WeightedInner, SelfIsMass) {
    const sps::Grid3 g(8, 3.0);
    const auto s = random_state(g, 4, {0.3, 0.7});
    const cplx v = sps::weighted_inner(s, s);
    EXPECT_EQ(v.real(), sps::weighted_mass(s));
    EXPECT_NEAR(v.imag(), 0.0, 1e-12 * v.real());
}

TEST(WeightedInner, OrthonormalPairGivesTwo) {
    const sps::Grid3 g(8, 3.0);
    const sps::MixedState s({sps::plane_wave(g, {1, 0, 0}), sps::plane_wave(g, {0, 1, 0})}, {1.0, 1.0});
    EXPECT_NEAR(std::abs(sps::weighted_inner(s, s) - cplx(2.0)), 0.0, 1e-12);
}

TEST(WeightedInner, MatchesComponentOracleAndIsConjugateSymmetric) {
    const sps::Grid3 g(8, 3.0);
    const auto a = random_state(g, 10, {0.4, 0.9});
    const auto b = random_state(g, 20, {0.4, 0.9});
    cplx oracle = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += std::conj(a[k][i]) * b[k][i];
        oracle += a.weights()[k] * acc * g.cell_volume();
    }
    const cplx ab = sps::weighted_inner(a, b);
    EXPECT_LT(std::abs(ab - oracle), 1e-12 * std::abs(oracle));
    EXPECT_LT(std::abs(ab - std::conj(sps::weighted_inner(b, a))), 1e-12 * std::abs(ab));
}

TEST(WeightedInner, MismatchThrows) {
    const sps::Grid3 g(8, 3.0);
    EXPECT_THROW(sps::weighted_inner(random_state(g, 1, {1.0}), random_state(g, 2, {1.0, 1.0})),
                 std::invalid_argument);
    EXPECT_THROW(sps::weighted_inner(random_state(g, 1, {1.0}), random_state(g, 2, {2.0})), std::invalid_argument);
}

TEST(Sobolev, OrderZeroIsL2) {
    const sps::Grid3 g(8, 3.0);
    const auto s = random_state(g, 3, {0.5, 1.5});
    EXPECT_NEAR(sps::sobolev_norm(s, 0.0, false), std::sqrt(sps::weighted_mass(s)), 1e-12);
}

TEST(Sobolev, PlaneWaveHomogeneousHalf) {
    const sps::Grid3 g(16, 5.0);
    const sps::MixedState s({sps::plane_wave(g, {2, -1, 2})}, {1.0});
    const double k = 3.0 * g.dk();
    EXPECT_NEAR(sps::sobolev_norm(s, 0.5, true), std::sqrt(k), 1e-12);
}

TEST(Sobolev, GaussianMatchesSymbolSum) {
    const sps::Grid3 g(32, 16.0);
    const sps::MixedState s({sps::gaussian_field(g, 1.0)}, {1.0});
    const auto c = sps::forward_transform(s[0]);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += std::pow(1.0 + g.k2(i), 0.5) * std::norm(c[i]);
    acc *= g.cell_volume() / static_cast<double>(g.size());
    EXPECT_NEAR(sps::sobolev_norm(s, 0.5, false), std::sqrt(acc), 1e-10);
}

TEST(Sobolev, MonotoneInOrder) {
    const sps::Grid3 g(8, 3.0);
    const auto s = random_state(g, 8, {1.0});
    double prev = 0.0;
    for (double order : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        const double v = sps::sobolev_norm(s, order, false);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Gram, OrthonormalInitialDataIsIdentity) {
    const sps::Grid3 g(32, 16.0);
    const sps::InitialRecipe r{sps::RadialGaussianStack{{1.0, 1.5, 2.0}}, {1.0, 0.5, 0.25}, true};
    const auto s = sps::build_initial_state(g, r);
    EXPECT_LT(sps::gram_matrix(s).max_deviation_from_identity(), 1e-10);
}

TEST(Gram, DuplicatedComponentIsRankDeficient) {
    const sps::Grid3 g(8, 3.0);
    const auto f = sps::plane_wave(g, {1, 1, 0});
    const sps::MixedState s({f, f}, {1.0, 1.0});
    const auto G = sps::gram_matrix(s);
    EXPECT_NEAR(std::abs(G(0, 1) - cplx(1.0)), 0.0, 1e-12);
    const cplx det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
    EXPECT_LT(std::abs(det), 1e-12);
    std::vector<sps::Field> dup{f, f};
    EXPECT_THROW(sps::orthonormalize(dup), std::invalid_argument);
}

TEST(Snapshot, RoundTrip) {
    const sps::Grid3 g(8, 3.0);
    const auto s = random_state(g, 40, {0.25, 2.0});
    const auto path = std::filesystem::temp_directory_path() / "sps_snapshot_test.sps";
    sps::write_snapshot(path, s);
    const auto back = sps::read_snapshot(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.rank(), 2u);
    EXPECT_EQ(back.grid(), g);
    EXPECT_EQ(back.weights(), s.weights());
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(back[k].values(), s[k].values());
}
