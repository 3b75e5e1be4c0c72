#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sps/evolution.hpp"
#include "sps/initial.hpp"

namespace sps {

// Validation failure; what() starts with the offending field path, e.g. "physics.epsilon".
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::invalid_argument(field + " " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct SimConfig {
    struct GridSettings {
        int n = 64;
        double L = 32.0;
    } grid;
    struct PhysicsSettings {
        double m = 1.0;
        double epsilon = 0.0;
        double alpha = 0.5;
        std::string kernel_mode = "truncated";  // "truncated" or "periodic"
        std::optional<double> R;                 // truncation radius, L/2 when absent
        std::string splitting = "strang";        // "strang" or "lie"
    } physics;
    struct TimeSettings {
        double dt = 0.01;
        double t_end = 1.0;
        long record_stride = 10;
        long snapshot_stride = 0;
    } time;
    InitialRecipe initial{RadialGaussianStack{{1.0}}, {1.0}, true};
    // When set, the amplitude is replaced by tune_negative_energy(target) before the run.
    std::optional<double> tune_target_energy;
    MonitorThresholds thresholds;
    struct OutputSettings {
        std::filesystem::path directory = "out";
        std::vector<std::string> formats{"csv", "json"};
    } output;

    void validate() const;
    Grid3 make_grid() const;
    KernelMode kernel() const;
    EvolutionParams evolution_params() const;
};

// Parse from a JSON tree; missing keys take defaults, unknown keys are rejected.
SimConfig parse_config(const nlohmann::json& j);
SimConfig load_config(const std::filesystem::path& path);
// Canonical tree with every default spelled out.
nlohmann::json serialize_config(const SimConfig& config);
// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const SimConfig& config);
std::string code_version();

struct TuneResult {
    double amplitude = 0.0;
    EnergyParts energy;
};

// Bisection on the amplitude c using kinetic ∝ c^2, potential ∝ c^4. For a negative target it
// returns the smallest c past the energy maximum with energy <= target; for a non-negative target
// it returns c on the rising branch with energy <= target. Throws std::runtime_error when the
// target is not reachable for c <= amplitude_cap.
TuneResult tune_negative_energy(const Grid3& grid, const InitialRecipe& recipe, double m, const KernelMode& kernel,
                                double target, double amplitude_cap = 64.0);

// Resolves tune_target_energy (if any) and builds the initial state.
MixedState prepare_initial_state(SimConfig& config);

struct RunReport {
    RunStatus status = RunStatus::Completed;
    std::string sentinel_reason;
    double final_time = 0.0;
    double energy0 = 0.0;
    std::vector<double> masses0;
    double h_half0 = 0.0;
    double max_h_half_ratio = 0.0;
    double max_boundary_fraction = 0.0;
    std::string config_hash;
    std::string code_version;
    Trajectory trajectory;

    nlohmann::json to_json(const SimConfig& config) const;
};

// Evolves the configured scenario and writes diagnostics.csv / diagnostics.json (per
// output.formats), snapshots, and report.json under output.directory.
RunReport run(SimConfig config, bool write_outputs = true);

struct StudyRow {
    double epsilon = 0.0;
    RunStatus status = RunStatus::Completed;
    std::string sentinel_reason;
    double final_time = 0.0;
    double max_h_half_ratio = 0.0;
    double final_h_half_ratio = 0.0;
};

struct StudyReport {
    double amplitude = 0.0;
    double energy0 = 0.0;
    std::vector<StudyRow> rows;
    bool zero_eps_blowup = false;
    bool positive_eps_completed = false;

    nlohmann::json to_json() const;
};

// Same initial data evolved for every epsilon. Throws ConfigError for an empty list or one
// without 0.
StudyReport blowup_study(const SimConfig& base, const std::vector<double>& epsilons, bool write_outputs = true);

// One acceptance criterion evaluated at pinned parameters.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string summary;
    nlohmann::json metrics;
};

struct SuiteReport {
    std::string suite;
    bool pass = false;
    std::vector<CriterionResult> criteria;
    nlohmann::json to_json() const;
};

const std::vector<std::string>& verify_suites();
// Throws std::invalid_argument for an unknown suite.
SuiteReport verify(const std::string& suite);

CriterionResult criterion_charge_conservation();
CriterionResult criterion_energy_conservation();
CriterionResult criterion_dissipation_identity();
CriterionResult criterion_linear_oracle();
CriterionResult criterion_dichotomy();
CriterionResult criterion_dilation_equality();
CriterionResult criterion_variance_chain();
CriterionResult criterion_newton_oracle();
CriterionResult criterion_kernel_exponents();
CriterionResult criterion_orthonormality();
CriterionResult criterion_convergence();

}  // namespace sps
