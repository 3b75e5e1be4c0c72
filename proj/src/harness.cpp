#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sps/harness.hpp"

namespace sps {

using nlohmann::json;

TuneResult tune_negative_energy(const Grid3& grid, const InitialRecipe& recipe, double m, const KernelMode& kernel,
                                double target, double amplitude_cap) {
    const auto* stack = std::get_if<RadialGaussianStack>(&recipe.kind);
    if (!stack) throw std::invalid_argument("tune_negative_energy: needs a radial Gaussian recipe");
    if (!(amplitude_cap > 0.0)) throw std::invalid_argument("tune_negative_energy: amplitude cap must be positive");

    InitialRecipe unit = recipe;
    std::get<RadialGaussianStack>(unit.kind).amplitude = 1.0;
    const EnergyParts base = energy(build_initial_state(grid, unit), m, kernel);
    const double kin = base.kinetic, pot = base.potential;
    auto e_of = [&](double c) { return c * c * kin + c * c * c * c * pot; };

    // energy maximum on c > 0 (none when the potential part vanishes)
    const double c_peak = pot < 0.0 ? std::min(std::sqrt(-kin / (2.0 * pot)), amplitude_cap) : amplitude_cap;
    double lo, hi;
    if (target < 0.0) {
        if (!(e_of(amplitude_cap) <= target))
            throw std::runtime_error("tune_negative_energy: target energy not reachable below the amplitude cap");
        lo = c_peak;  // e > target
        hi = amplitude_cap;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (e_of(mid) <= target ? hi : lo) = mid;
        }
    } else if (e_of(c_peak) <= target) {
        hi = c_peak;
    } else {
        lo = c_peak;  // e > target
        hi = 0.0;
        for (int it = 0; it < 200 && lo - hi > 1e-13 * lo; ++it) {
            const double mid = 0.5 * (lo + hi);
            (e_of(mid) <= target ? hi : lo) = mid;
        }
        if (hi == 0.0) throw std::runtime_error("tune_negative_energy: bisection did not bracket the target");
    }

    TuneResult out;
    out.amplitude = hi;
    InitialRecipe tuned = recipe;
    std::get<RadialGaussianStack>(tuned.kind).amplitude = hi;
    out.energy = energy(build_initial_state(grid, tuned), m, kernel);
    return out;
}

MixedState prepare_initial_state(SimConfig& config) {
    config.validate();
    const Grid3 grid = config.make_grid();
    if (config.tune_target_energy) {
        const auto tuned = tune_negative_energy(grid, config.initial, config.physics.m, config.kernel(),
                                                *config.tune_target_energy);
        std::get<RadialGaussianStack>(config.initial.kind).amplitude = tuned.amplitude;
        config.tune_target_energy.reset();
    }
    return build_initial_state(grid, config.initial);
}

json RunReport::to_json(const SimConfig& config) const {
    json j;
    j["status"] = to_string(status);
    j["final_time"] = final_time;
    j["sentinel_reason"] = sentinel_reason.empty() ? json(nullptr) : json(sentinel_reason);
    j["energy0"] = energy0;
    j["masses0"] = masses0;
    j["h_half0"] = h_half0;
    j["max_h_half_ratio"] = max_h_half_ratio;
    j["max_boundary_fraction"] = max_boundary_fraction;
    j["config_hash"] = config_hash;
    j["code_version"] = code_version;
    j["window"] = {{"kind", "cosine"}, {"shell_fraction", WindowConfig{}.shell_fraction}};
    j["config"] = serialize_config(config);
    return j;
}

RunReport run(SimConfig config, bool write_outputs) {
    const MixedState initial = prepare_initial_state(config);
    const auto dir = config.output.directory;
    const bool csv = std::count(config.output.formats.begin(), config.output.formats.end(), "csv") > 0;
    const bool js = std::count(config.output.formats.begin(), config.output.formats.end(), "json") > 0;

    std::ofstream csv_out;
    if (write_outputs) {
        std::filesystem::create_directories(dir);
        if (csv) {
            csv_out.open(dir / "diagnostics.csv");
            if (!csv_out) throw std::runtime_error("cannot write " + (dir / "diagnostics.csv").string());
            csv_out << csv_header(initial.rank()) << "\n";
        }
    }

    Observers obs;
    obs.record_stride = config.time.record_stride;
    obs.snapshot_stride = write_outputs ? config.time.snapshot_stride : 0;
    obs.snapshot_dir = dir;
    obs.thresholds = config.thresholds;
    if (csv_out.is_open()) obs.on_record = [&](const DiagnosticsRecord& r) { csv_out << to_csv_row(r) << "\n"; };

    RunReport rep;
    rep.trajectory = evolve(initial, config.evolution_params(), obs);
    const Trajectory& traj = rep.trajectory;
    rep.status = traj.status;
    rep.sentinel_reason = traj.sentinel_reason;
    rep.final_time = traj.final_time;
    rep.max_boundary_fraction = traj.max_boundary_fraction;
    const auto& r0 = traj.records.front();
    rep.energy0 = r0.energy;
    rep.masses0 = r0.masses;
    rep.h_half0 = r0.h_half;
    for (const auto& r : traj.records) rep.max_h_half_ratio = std::max(rep.max_h_half_ratio, r.h_half / r0.h_half);
    rep.config_hash = config_hash(config);
    rep.code_version = code_version();

    if (write_outputs) {
        if (js) {
            json arr = json::array();
            for (const auto& r : traj.records) arr.push_back(to_json(r));
            std::ofstream(dir / "diagnostics.json") << std::setw(2) << arr << "\n";
        }
        std::ofstream(dir / "report.json") << std::setw(2) << rep.to_json(config) << "\n";
    }
    return rep;
}

json StudyReport::to_json() const {
    json rows_json = json::array();
    for (const auto& r : rows) {
        json row = {{"epsilon", r.epsilon},
                    {"status", to_string(r.status)},
                    {"final_time", r.final_time},
                    {"max_h_half_ratio", r.max_h_half_ratio},
                    {"final_h_half_ratio", r.final_h_half_ratio}};
        row["sentinel_time"] = r.status == RunStatus::BlowupDetected ? json(r.final_time) : json(nullptr);
        row["sentinel_reason"] = r.sentinel_reason.empty() ? json(nullptr) : json(r.sentinel_reason);
        rows_json.push_back(row);
    }
    return {{"amplitude", amplitude},
            {"energy0", energy0},
            {"rows", rows_json},
            {"zero_eps_blowup", zero_eps_blowup},
            {"positive_eps_completed", positive_eps_completed}};
}

StudyReport blowup_study(const SimConfig& base, const std::vector<double>& epsilons, bool write_outputs) {
    if (epsilons.empty()) throw ConfigError("epsilon_list", "must not be empty");
    if (std::find(epsilons.begin(), epsilons.end(), 0.0) == epsilons.end())
        throw ConfigError("epsilon_list", "must include 0");
    for (double e : epsilons)
        if (!(e >= 0.0)) throw ConfigError("epsilon_list", "entries must be >= 0");

    // tune once so every epsilon starts from identical data
    SimConfig fixed = base;
    prepare_initial_state(fixed);

    StudyReport rep;
    if (const auto* g = std::get_if<RadialGaussianStack>(&fixed.initial.kind)) rep.amplitude = g->amplitude;
    rep.positive_eps_completed = true;
    for (double eps : epsilons) {
        SimConfig c = fixed;
        c.physics.epsilon = eps;
        std::ostringstream sub;
        sub << "eps_" << eps;
        c.output.directory = fixed.output.directory / sub.str();
        const RunReport r = run(c, write_outputs);
        rep.energy0 = r.energy0;
        StudyRow row;
        row.epsilon = eps;
        row.status = r.status;
        row.sentinel_reason = r.sentinel_reason;
        row.final_time = r.final_time;
        row.max_h_half_ratio = r.max_h_half_ratio;
        row.final_h_half_ratio = r.trajectory.records.back().h_half / r.h_half0;
        if (eps == 0.0) rep.zero_eps_blowup = r.status == RunStatus::BlowupDetected;
        else if (r.status != RunStatus::Completed) rep.positive_eps_completed = false;
        rep.rows.push_back(row);
    }
    if (write_outputs) {
        std::filesystem::create_directories(fixed.output.directory);
        std::ofstream(fixed.output.directory / "study.json") << std::setw(2) << rep.to_json() << "\n";
    }
    return rep;
}

}  // namespace sps
