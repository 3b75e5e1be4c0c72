#include "sps/evolution.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "sps/spectral.hpp"

namespace sps {

void EvolutionParams::validate(const Grid3& grid) const {
    if (!(mass >= 0.0)) throw std::invalid_argument("physics.m must be >= 0");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("physics.epsilon must be >= 0");
    if (!(alpha >= 0.5)) throw std::invalid_argument("physics.alpha must be >= 1/2");
    if (!(dt > 0.0)) throw std::invalid_argument("time.dt must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("time.t_end must be positive");
    if (dt > t_end) throw std::invalid_argument("time.dt must not exceed time.t_end");
    validate_kernel(kernel, grid);
}

long EvolutionParams::steps() const { return std::lround(t_end / dt); }

Multiplier linear_step_symbol(const Grid3& grid, const EvolutionParams& p, double tau) {
    const double m2 = p.mass * p.mass;
    const double two_alpha = 2.0 * p.alpha;
    return Multiplier::from_radial(grid, [&](double k) {
        const double omega = std::sqrt(k * k + m2);
        const double damp = (p.epsilon == 0.0 || k == 0.0) ? 0.0 : p.epsilon * std::pow(k, two_alpha);
        return std::exp(cplx{-damp * tau, -omega * tau});
    });
}

Multiplier linear_half_step_symbol(const Grid3& grid, const EvolutionParams& params) {
    return linear_step_symbol(grid, params, 0.5 * params.dt);
}

Propagator::Propagator(const Grid3& grid, const EvolutionParams& params)
    : grid_(grid), params_(params), coulomb_(coulomb_symbol(grid, params.kernel)) {
    params_.validate(grid);
    half_ = linear_step_symbol(grid, params_, 0.5 * params_.dt).symbol();
    full_ = linear_step_symbol(grid, params_, params_.dt).symbol();
    diss_.resize(grid.size());
    for (std::size_t i = 0; i < diss_.size(); ++i) {
        const double k = grid.kabs(i);
        diss_[i] = k == 0.0 ? 0.0 : std::pow(k, 2.0 * params_.alpha);
    }
}

RVec Propagator::potential(const MixedState& state) const {
    if (params_.linear_only) return RVec(grid_.size(), 0.0);
    return solve_potential(density(state), coulomb_);
}

void Propagator::phase(MixedState& state) const {
    if (params_.linear_only) return;
    const RVec n = density(state);
    double total = 0.0;
    for (double v : n) total += v;
    if (!std::isfinite(total)) throw BlowupSignal("non-finite density");
    const RVec v = solve_potential(n, coulomb_);
    CVec rot(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) rot[i] = std::polar(1.0, -params_.dt * v[i]);
    for (auto& comp : state.components()) {
        auto& psi = comp.values();
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= rot[i];
    }
}

double Propagator::dissipation_rate_coeffs(const CVec& coeffs) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc += diss_[i] * std::norm(coeffs[i]);
    return acc * grid_.cell_volume() / static_cast<double>(grid_.size());
}

void Propagator::step(MixedState& state) const { advance(state, 1); }

std::vector<double> Propagator::advance(MixedState& state, long nsteps) const {
    std::vector<double> rates(static_cast<std::size_t>(nsteps) + 1, 0.0);
    if (nsteps <= 0) return rates;
    const bool track = params_.epsilon > 0.0;
    const double two_eps = 2.0 * params_.epsilon;
    const auto& fft = grid_.fft();
    CVec coeffs(grid_.size());
    const auto& w = state.weights();

    auto multiply = [&](const CVec& sym) {
        for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= sym[i];
    };

    if (params_.splitting == Splitting::Lie) {
        for (long s = 0; s < nsteps; ++s) {
            for (std::size_t k = 0; k < state.rank(); ++k) {
                fft.forward(state[k].data(), coeffs.data());
                if (track) rates[s] += two_eps * w[k] * dissipation_rate_coeffs(coeffs);
                multiply(full_);
                fft.inverse(coeffs.data(), state[k].data());
            }
            phase(state);
        }
        if (track) {
            for (std::size_t k = 0; k < state.rank(); ++k) {
                fft.forward(state[k].data(), coeffs.data());
                rates[nsteps] += two_eps * w[k] * dissipation_rate_coeffs(coeffs);
            }
        }
        if (!state.all_finite()) throw BlowupSignal("non-finite state");
        return rates;
    }

    // Strang: H P H H P H ... with interior H H pairs applied as one multiplication
    // except for evaluating the rate at the step boundary between them.
    for (std::size_t k = 0; k < state.rank(); ++k) {
        fft.forward(state[k].data(), coeffs.data());
        if (track) rates[0] += two_eps * w[k] * dissipation_rate_coeffs(coeffs);
        multiply(half_);
        fft.inverse(coeffs.data(), state[k].data());
    }
    for (long s = 1; s <= nsteps; ++s) {
        phase(state);
        const bool last = s == nsteps;
        for (std::size_t k = 0; k < state.rank(); ++k) {
            fft.forward(state[k].data(), coeffs.data());
            if (track || last) {
                multiply(half_);
                if (track) rates[s] += two_eps * w[k] * dissipation_rate_coeffs(coeffs);
                if (!last) multiply(half_);
            } else {
                multiply(full_);
            }
            fft.inverse(coeffs.data(), state[k].data());
        }
    }
    if (!state.all_finite()) throw BlowupSignal("non-finite state");
    return rates;
}

MixedState exact_linear_flow(const MixedState& state, const EvolutionParams& params, double t) {
    const Multiplier sym = linear_step_symbol(state.grid(), params, t);
    MixedState out = state;
    for (auto& c : out.components()) apply_multiplier_inplace(c, sym);
    return out;
}

std::string to_string(RunStatus s) { return s == RunStatus::Completed ? "Completed" : "BlowupDetected"; }

Trajectory evolve(const MixedState& initial, const EvolutionParams& params, const Observers& obs) {
    const Grid3& grid = initial.grid();
    params.validate(grid);
    if (obs.record_stride <= 0) throw std::invalid_argument("time.record_stride must be positive");
    if (params.dt > 0.5 * grid.spacing())
        std::cerr << "warning: dt=" << params.dt << " exceeds 0.5*spacing=" << 0.5 * grid.spacing()
                  << " (accuracy heuristic)\n";

    const Propagator prop(grid, params);
    const DiagnosticsEngine diag(grid, params.mass, params.kernel, params.alpha, obs.window);
    const long total = params.steps();

    Trajectory traj;
    MixedState state = initial;
    double ledger = 0.0;
    bool warned = false;

    auto record = [&](double t) {
        auto r = diag.sample(state, t, ledger);
        const double bf = diag.boundary_fraction(state);
        traj.max_boundary_fraction = std::max(traj.max_boundary_fraction, bf);
        if (bf > 1e-6 && !warned) {
            std::cerr << "warning: mass fraction " << bf << " inside the window taper at t=" << t << "\n";
            warned = true;
        }
        traj.records.push_back(r);
        if (obs.on_record) obs.on_record(traj.records.back());
        if (obs.on_state) obs.on_state(state, t);
        return traj.records.back();
    };
    auto snapshot = [&](long step) {
        if (obs.snapshot_stride <= 0 || step % obs.snapshot_stride != 0) return;
        std::ostringstream name;
        name << "snapshot_" << step << ".sps";
        const auto path = obs.snapshot_dir / name.str();
        write_snapshot(path, state);
        traj.snapshots.push_back(path);
    };

    const auto first = record(0.0);
    const double h0 = first.h_half;
    snapshot(0);

    long step = 0;
    while (step < total) {
        const long chunk = std::min(obs.record_stride, total - step);
        std::vector<double> rates;
        try {
            rates = prop.advance(state, chunk);
        } catch (const BlowupSignal& e) {
            traj.status = RunStatus::BlowupDetected;
            traj.sentinel_reason = e.what();
            traj.final_time = (step + chunk) * params.dt;
            traj.steps_taken = step + chunk;
            traj.final_state = std::move(state);
            return traj;
        }
        for (long s = 0; s < chunk; ++s) ledger = dissipation_ledger_update(ledger, rates[s], rates[s + 1], params.dt);
        step += chunk;
        const double t = step * params.dt;
        const auto r = record(t);
        snapshot(step);
        const auto verdict = blowup_monitor(r, h0, obs.thresholds);
        if (verdict.blowup) {
            traj.status = RunStatus::BlowupDetected;
            traj.sentinel_reason = verdict.reason;
            traj.final_time = t;
            traj.steps_taken = step;
            traj.final_state = std::move(state);
            return traj;
        }
    }
    traj.final_time = total * params.dt;
    traj.steps_taken = total;
    traj.final_state = std::move(state);
    return traj;
}

double weighted_distance(const MixedState& a, const MixedState& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.rank(); ++k) acc += a.weights()[k] * norm2(a[k] - b[k]);
    return std::sqrt(acc);
}

ConvergenceResult convergence_study(const MixedState& initial, const EvolutionParams& params,
                                    const std::vector<double>& dts, int reference_factor) {
    if (dts.size() < 3) throw std::invalid_argument("convergence_study: need >= 3 levels");
    if (reference_factor < 2) throw std::invalid_argument("convergence_study: reference factor must be >= 2");
    double dt_min = dts.front();
    for (double d : dts) dt_min = std::min(dt_min, d);

    auto run = [&](double dt) {
        EvolutionParams p = params;
        p.dt = dt;
        const long n = p.steps();
        if (std::abs(n * dt - p.t_end) > 1e-9 * p.t_end)
            throw std::invalid_argument("convergence_study: dt must divide t_end");
        MixedState s = initial;
        Propagator(initial.grid(), p).advance(s, n);
        return s;
    };

    ConvergenceResult out;
    out.reference_dt = dt_min / reference_factor;
    const MixedState ref = run(out.reference_dt);
    for (double dt : dts) out.rows.push_back({dt, weighted_distance(run(dt), ref)});

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(out.rows.size());
    for (const auto& r : out.rows) {
        const double x = std::log(r.dt), y = std::log(r.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return out;
}

}  // namespace sps
