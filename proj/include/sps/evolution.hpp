#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sps/diagnostics.hpp"
#include "sps/hartree.hpp"
#include "sps/mixed_state.hpp"

namespace sps {

enum class Splitting { Strang, Lie };

struct EvolutionParams {
    double mass = 1.0;
    double epsilon = 0.0;
    double alpha = 0.5;
    double dt = 0.01;
    double t_end = 1.0;
    KernelMode kernel = PeriodicKernel{};
    Splitting splitting = Splitting::Strang;
    bool linear_only = false;  // V forced to zero

    void validate(const Grid3& grid) const;
    long steps() const;  // round(t_end / dt)
};

// Raised when a step produces non-finite values.
class BlowupSignal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// exp(-i (dt/2) sqrt(|k|^2+m^2) - eps (dt/2) |k|^{2 alpha})
Multiplier linear_half_step_symbol(const Grid3& grid, const EvolutionParams& params);
Multiplier linear_step_symbol(const Grid3& grid, const EvolutionParams& params, double tau);

// Split-step propagator. Symbols are built once; the object is immutable and can be
// shared by concurrent runs on distinct states.
class Propagator {
public:
    Propagator(const Grid3& grid, const EvolutionParams& params);

    const EvolutionParams& params() const { return params_; }
    const Grid3& grid() const { return grid_; }

    // One step (Strang or Lie per params).
    void step(MixedState& state) const;

    // nsteps consecutive steps; Strang half-steps between steps are fused into one full
    // linear step. Returns the dissipation rate 2 eps sum lambda <psi,(-Lap)^alpha psi> at
    // each of the nsteps+1 step boundaries (all zeros when eps == 0).
    std::vector<double> advance(MixedState& state, long nsteps) const;

    // V[Psi] for the current state (zero when linear_only).
    RVec potential(const MixedState& state) const;

private:
    void phase(MixedState& state) const;
    double dissipation_rate_coeffs(const CVec& coeffs) const;

    Grid3 grid_;
    EvolutionParams params_;
    CVec half_;
    CVec full_;
    RVec diss_;  // |k|^{2 alpha}
    Multiplier coulomb_;
};

// Mixed state psi_k -> psi_k(t) for the linear flow with V = 0, exactly.
MixedState exact_linear_flow(const MixedState& state, const EvolutionParams& params, double t);

enum class RunStatus { Completed, BlowupDetected };
std::string to_string(RunStatus s);

struct Observers {
    long record_stride = 10;
    long snapshot_stride = 0;  // 0 disables snapshots
    std::filesystem::path snapshot_dir;
    MonitorThresholds thresholds;
    WindowConfig window;
    std::function<void(const DiagnosticsRecord&)> on_record;
    // Called with the state at every recorded time.
    std::function<void(const MixedState&, double)> on_state;
};

struct Trajectory {
    RunStatus status = RunStatus::Completed;
    std::string sentinel_reason;
    double final_time = 0.0;
    long steps_taken = 0;
    std::vector<DiagnosticsRecord> records;
    std::vector<std::filesystem::path> snapshots;
    std::optional<MixedState> final_state;
    double max_boundary_fraction = 0.0;
};

Trajectory evolve(const MixedState& initial, const EvolutionParams& params, const Observers& observers);

struct ConvergenceRow {
    double dt;
    double error;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double reference_dt = 0.0;
    double order = 0.0;  // least-squares slope of log(error) vs log(dt)
};

// Self-convergence in the weighted L2 norm at params.t_end. Each level dt must divide t_end.
// The reference solution uses dt_min / reference_factor.
ConvergenceResult convergence_study(const MixedState& initial, const EvolutionParams& params,
                                    const std::vector<double>& dts, int reference_factor = 8);

double weighted_distance(const MixedState& a, const MixedState& b);

}  // namespace sps
