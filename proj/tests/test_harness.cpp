#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sps/harness.hpp"

namespace {

using nlohmann::json;

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("sps_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

sps::SimConfig small_config(const std::string& name) {
    sps::SimConfig c;
    c.grid = {32, 16.0};
    c.time.dt = 0.02;
    c.time.t_end = 0.2;
    c.time.record_stride = 2;
    c.output.directory = scratch_dir(name);
    return c;
}

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
    const auto c = sps::parse_config(json::object());
    EXPECT_EQ(c.grid.n, 64);
    EXPECT_EQ(c.grid.L, 32.0);
    EXPECT_EQ(c.physics.alpha, 0.5);
    EXPECT_EQ(c.time.dt, 0.01);
    const json once = sps::serialize_config(c);
    const json twice = sps::serialize_config(sps::parse_config(once));
    EXPECT_EQ(once, twice);
}

TEST(Config, RoundTripOfCustomTree) {
    const json j = {{"grid", {{"n", 32}, {"L", 20.0}}},
                    {"physics", {{"epsilon", 0.1}, {"alpha", 0.75}, {"kernel_mode", "periodic"}}},
                    {"initial", {{"kind", "plane_wave"}, {"modes", {{1, 0, 0}, {0, 2, 1}}}, {"weights", {1.0, 0.5}}}},
                    {"output", {{"formats", {"csv"}}}}};
    const json once = sps::serialize_config(sps::parse_config(j));
    EXPECT_EQ(once, sps::serialize_config(sps::parse_config(once)));
    EXPECT_EQ(once["physics"]["kernel_mode"], "periodic");
    EXPECT_EQ(once["initial"]["modes"].size(), 2u);
}

TEST(Config, NegativeEpsilonNamesField) {
    try {
        sps::parse_config({{"physics", {{"epsilon", -0.1}}}});
        FAIL() << "expected ConfigError";
    } catch (const sps::ConfigError& e) {
        EXPECT_EQ(e.field(), "physics.epsilon");
        EXPECT_NE(std::string(e.what()).find("physics.epsilon"), std::string::npos);
    }
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(sps::parse_config({{"physics", {{"epsilonn", 0.1}}}}), sps::ConfigError);
    EXPECT_THROW(sps::parse_config({{"grid", {{"n", 31}}}}), sps::ConfigError);
    EXPECT_THROW(sps::parse_config({{"physics", {{"alpha", 0.3}}}}), sps::ConfigError);
    EXPECT_THROW(sps::parse_config({{"physics", {{"kernel_mode", "ewald"}}}}), sps::ConfigError);
}

TEST(Config, HashIsDeterministicAndSensitive) {
    const auto a = sps::parse_config(json::object());
    const auto b = sps::parse_config(json::object());
    EXPECT_EQ(sps::config_hash(a), sps::config_hash(b));
    EXPECT_EQ(sps::config_hash(a).size(), 16u);
    auto c = a;
    c.physics.epsilon = 0.05;
    EXPECT_NE(sps::config_hash(a), sps::config_hash(c));
    EXPECT_FALSE(sps::code_version().empty());
}

TEST(Tune, RankOneGaussianReachesNegativeEnergy) {
    const sps::Grid3 g(32, 16.0);
    const sps::InitialRecipe r{sps::RadialGaussianStack{{1.0}}, {1.0}, true};
    const auto res = sps::tune_negative_energy(g, r, 1.0, sps::default_kernel(g), -0.1);
    EXPECT_LT(res.energy.total, 0.0);
    EXPECT_NEAR(res.energy.total, -0.1, 1e-8);
}

TEST(Tune, PositiveTargetGivesSmallAmplitude) {
    const sps::Grid3 g(32, 16.0);
    const sps::InitialRecipe r{sps::RadialGaussianStack{{1.0}}, {1.0}, true};
    const auto res = sps::tune_negative_energy(g, r, 1.0, sps::default_kernel(g), 0.1);
    EXPECT_LE(res.energy.total, 0.1 * (1.0 + 1e-8));
    EXPECT_GT(res.energy.total, 0.0);
    EXPECT_LT(res.energy.potential, 0.0);
    EXPECT_LT(-res.energy.potential, 0.1 * res.energy.kinetic);
}

TEST(Tune, RankThreeStack) {
    const sps::Grid3 g(32, 16.0);
    const sps::InitialRecipe r{sps::RadialGaussianStack{{1.0, 1.3, 1.6}}, {1.0, 0.5, 0.25}, true};
    const auto res = sps::tune_negative_energy(g, r, 1.0, sps::default_kernel(g), -0.05);
    EXPECT_GT(res.amplitude, 0.0);
    EXPECT_NEAR(res.energy.total, -0.05, 1e-8);
    EXPECT_NEAR(res.energy.total, res.energy.kinetic + res.energy.potential, 1e-12);
}

TEST(Tune, UnreachableTargetThrows) {
    const sps::Grid3 g(32, 16.0);
    const sps::InitialRecipe r{sps::RadialGaussianStack{{1.0}}, {1.0}, true};
    EXPECT_THROW(sps::tune_negative_energy(g, r, 1.0, sps::default_kernel(g), -0.1, 1.0), std::runtime_error);
    const sps::InitialRecipe waves{sps::PlaneWaveStack{{{1, 0, 0}}}, {1.0}, true};
    EXPECT_THROW(sps::tune_negative_energy(g, waves, 1.0, sps::default_kernel(g), -0.1), std::invalid_argument);
}

TEST(Run, WritesReportAndIsDeterministic) {
    auto c = small_config("run_a");
    const auto rep = sps::run(c);
    EXPECT_EQ(rep.status, sps::RunStatus::Completed);
    const auto dir = c.output.directory;
    ASSERT_TRUE(std::filesystem::exists(dir / "diagnostics.csv"));
    ASSERT_TRUE(std::filesystem::exists(dir / "diagnostics.json"));
    const json report = json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["status"], "Completed");
    EXPECT_EQ(report["config_hash"], sps::config_hash(c));
    EXPECT_EQ(report["code_version"], sps::code_version());
    EXPECT_TRUE(report.contains("energy0"));
    EXPECT_TRUE(report.contains("masses0"));

    auto c2 = c;
    c2.output.directory = scratch_dir("run_b");
    sps::run(c2);
    EXPECT_EQ(slurp(dir / "diagnostics.csv"), slurp(c2.output.directory / "diagnostics.csv"));
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(c2.output.directory);
}

TEST(Study, EpsilonListValidation) {
    const auto c = small_config("study");
    try {
        sps::blowup_study(c, {}, false);
        FAIL() << "expected ConfigError";
    } catch (const sps::ConfigError& e) {
        EXPECT_EQ(e.field(), "epsilon_list");
    }
    EXPECT_THROW(sps::blowup_study(c, {0.1}, false), sps::ConfigError);
    EXPECT_THROW(sps::blowup_study(c, {0.0, -0.1}, false), sps::ConfigError);
}

TEST(Study, PositiveEnergyDataHasNoSentinel) {
    auto c = small_config("study_pos");
    const auto rep = sps::blowup_study(c, {0.0}, false);
    ASSERT_EQ(rep.rows.size(), 1u);
    EXPECT_GT(rep.energy0, 0.0);
    EXPECT_EQ(rep.rows[0].status, sps::RunStatus::Completed);
    EXPECT_FALSE(rep.zero_eps_blowup);
}

TEST(Verify, UnknownSuiteThrows) {
    EXPECT_THROW(sps::verify("nonsense"), std::invalid_argument);
    EXPECT_FALSE(sps::verify_suites().empty());
}
