#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sps/harness.hpp"
#include "sps/semigroup_lab.hpp"

namespace sps {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

SimConfig desk_config() {
    SimConfig c;
    c.grid = {64, 32.0};
    c.physics.m = 1.0;
    c.physics.kernel_mode = "truncated";
    c.time.dt = 0.01;
    c.initial = InitialRecipe{RadialGaussianStack{{1.0}, 1.0, true}, {1.0}, true};
    return c;
}

// Negative-energy radial data used by the dichotomy, dilation and variance criteria. The small
// rest mass lets a moderately supercritical amplitude reach negative energy.
SimConfig collapse_config() {
    SimConfig c = desk_config();
    c.physics.m = 0.25;
    c.time.t_end = 6.0;
    c.tune_target_energy = -0.1;
    return c;
}

MixedState initial_of(SimConfig c) { return prepare_initial_state(c); }

Observers quiet_observers(long stride) {
    Observers o;
    o.record_stride = stride;
    return o;
}

// Central differences of a uniformly sampled series at interior points 1..n-2.
std::vector<double> central_diff(const std::vector<double>& y, double dt) {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) out.push_back((y[i + 1] - y[i - 1]) / (2.0 * dt));
    return out;
}

// Least-squares polynomial coefficients c0 + c1 t + c2 t^2.
std::array<double, 3> quadratic_fit(const std::vector<double>& t, const std::vector<double>& y) {
    double s[5] = {0, 0, 0, 0, 0}, b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < t.size(); ++i) {
        double p = 1.0;
        for (int k = 0; k < 5; ++k, p *= t[i]) s[k] += p;
        b[0] += y[i];
        b[1] += y[i] * t[i];
        b[2] += y[i] * t[i] * t[i];
    }
    double a[3][4] = {{s[0], s[1], s[2], b[0]}, {s[1], s[2], s[3], b[1]}, {s[2], s[3], s[4], b[2]}};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

struct NewtonBoundCheck {
    double max_rv = 0.0;   // max |x| |V|
    double max_r2dv = 0.0; // max |x|^2 |grad V|
    double radius = 0.0;   // evaluation ball
};

// Radius outside which at most `fraction` of the density's mass lies.
double support_radius(const RVec& dens, const Grid3& grid, double fraction) {
    const auto& x = grid.coord_axis();
    std::vector<std::pair<double, double>> shells(grid.size());
    double total = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflatten(i);
        shells[i] = {std::sqrt(x[idx[0]] * x[idx[0]] + x[idx[1]] * x[idx[1]] + x[idx[2]] * x[idx[2]]), dens[i]};
        total += dens[i];
    }
    std::sort(shells.begin(), shells.end());
    double outside = 0.0;
    for (auto it = shells.rbegin(); it != shells.rend(); ++it) {
        outside += it->second;
        if (outside > fraction * total) return it->first;
    }
    return 0.0;
}

// Newton bounds on the ball where the truncated kernel sees all of the mass:
// |x| < min(L/4, R - r_supp), origin excluded. The gradient is spectral.
NewtonBoundCheck newton_bounds(const RVec& potential, const RVec& dens, const Grid3& grid) {
    Field v(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = potential[i];
    const Field vhat = forward_transform(v);
    std::array<Field, 3> grad;
    for (int j = 0; j < 3; ++j) {
        Field d = vhat;
        const auto& ax = grid.freq_axis();
        const int n = grid.n();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto idx = grid.unflatten(i);
            const int m = idx[j];
            d[i] *= m == n / 2 ? cplx{0.0, 0.0} : cplx{0.0, ax[m]};
        }
        grad[j] = inverse_transform(d);
    }
    NewtonBoundCheck out;
    const double rmax = std::min(0.25 * grid.box_length(),
                                 0.5 * grid.box_length() - support_radius(dens, grid, 1e-6));
    out.radius = rmax;
    const auto& x = grid.coord_axis();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflatten(i);
        const double r2 = x[idx[0]] * x[idx[0]] + x[idx[1]] * x[idx[1]] + x[idx[2]] * x[idx[2]];
        if (r2 == 0.0 || r2 >= rmax * rmax) continue;
        const double g = std::sqrt(std::norm(grad[0][i]) + std::norm(grad[1][i]) + std::norm(grad[2][i]));
        out.max_rv = std::max(out.max_rv, std::sqrt(r2) * std::abs(potential[i]));
        out.max_r2dv = std::max(out.max_r2dv, r2 * g);
    }
    return out;
}

// One epsilon = 0 collapse run sampled at every step, plus the same data at half the step
// sampled at the same times. Shared by the dilation and variance criteria.
struct CollapseSeries {
    double energy0 = 0.0;
    double total_mass = 0.0;
    double sample_dt = 0.0;
    RunStatus status = RunStatus::Completed;
    double final_time = 0.0;
    std::vector<DiagnosticsRecord> coarse, fine;
    std::vector<NewtonBoundCheck> newton;  // one per coarse record
    double coarse_spacing = 0.0;
};

const CollapseSeries& collapse_series() {
    static std::once_flag once;
    static CollapseSeries series;
    std::call_once(once, [] {
        SimConfig cfg = collapse_config();
        const MixedState init = initial_of(cfg);
        EvolutionParams p = cfg.evolution_params();
        series.sample_dt = p.dt;
        series.coarse_spacing = init.grid().spacing();

        Observers o = quiet_observers(1);
        const Propagator prop(init.grid(), p);
        o.on_state = [&](const MixedState& s, double) {
            series.newton.push_back(newton_bounds(prop.potential(s), density(s), s.grid()));
        };
        const Trajectory coarse = evolve(init, p, o);
        series.coarse = coarse.records;
        series.status = coarse.status;
        series.final_time = coarse.final_time;
        series.energy0 = coarse.records.front().energy;
        series.total_mass = coarse.records.front().total_mass;

        EvolutionParams half = p;
        half.dt = 0.5 * p.dt;
        half.t_end = coarse.final_time;
        const Trajectory fine = evolve(init, half, quiet_observers(2));
        series.fine = fine.records;
    });
    return series;
}

// Samples before resolution loss sets in: tail_fraction stays below this share.
constexpr double kResolvedTail = 1e-3;

std::size_t resolved_prefix(const std::vector<DiagnosticsRecord>& recs) {
    std::size_t n = 0;
    while (n < recs.size() && recs[n].tail_fraction <= kResolvedTail) ++n;
    return n;
}

struct OrthoRun {
    double mass_drift = 0.0;
    double gram_drift = 0.0;
    long steps = 0;
};

// epsilon = 0 rank-2 run of 1000 steps; shared by charge conservation and Gram transport.
const OrthoRun& conservation_run() {
    static std::once_flag once;
    static OrthoRun out;
    std::call_once(once, [] {
        SimConfig cfg = desk_config();
        cfg.initial = InitialRecipe{RadialGaussianStack{{1.0, 1.5}, 1.0, true}, {1.0, 0.5}, true};
        cfg.time.t_end = 10.0;
        const MixedState init = initial_of(cfg);
        const GramMatrix g0 = gram_matrix(init);
        const Trajectory tr = evolve(init, cfg.evolution_params(), quiet_observers(100));
        const auto& m0 = tr.records.front().masses;
        for (const auto& r : tr.records)
            for (std::size_t k = 0; k < m0.size(); ++k)
                out.mass_drift = std::max(out.mass_drift, std::abs(r.masses[k] - m0[k]) / m0[k]);
        out.gram_drift = gram_matrix(*tr.final_state).max_deviation(g0);
        out.steps = tr.steps_taken;
    });
    return out;
}

}  // namespace

CriterionResult criterion_charge_conservation() {
    const auto& run = conservation_run();
    CriterionResult c{1, "charge conservation", run.mass_drift <= 1e-10, "", {}};
    c.metrics = {{"max_relative_mass_drift", run.mass_drift}, {"steps", run.steps}, {"tolerance", 1e-10}};
    c.summary = "max per-component mass drift " + fmt(run.mass_drift) + " over " + std::to_string(run.steps) + " steps";
    return c;
}

CriterionResult criterion_energy_conservation() {
    SimConfig cfg = desk_config();
    cfg.time.t_end = 1.0;
    const MixedState init = initial_of(cfg);
    const std::vector<double> dts{0.04, 0.02, 0.01, 0.005};
    std::vector<double> drifts;
    for (double dt : dts) {
        EvolutionParams p = cfg.evolution_params();
        p.dt = dt;
        const Trajectory tr = evolve(init, p, quiet_observers(std::lround(0.2 / dt)));
        const double e0 = tr.records.front().energy;
        double d = 0.0;
        for (const auto& r : tr.records) d = std::max(d, std::abs(r.energy - e0) / std::abs(e0));
        drifts.push_back(d);
    }
    std::vector<double> ratios;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < drifts.size(); ++i) {
        ratios.push_back(drifts[i] / drifts[i + 1]);
        ok = ok && ratios.back() >= 3.5 && ratios.back() <= 4.5;
    }
    CriterionResult c{2, "energy conservation", ok, "", {}};
    c.metrics = {{"dt", dts}, {"relative_energy_drift", drifts}, {"halving_ratios", ratios}, {"ratio_band", {3.5, 4.5}}};
    std::ostringstream s;
    s << "drift halving ratios";
    for (double r : ratios) s << " " << fmt(r);
    c.summary = s.str();
    return c;
}

CriterionResult criterion_dissipation_identity() {
    SimConfig cfg = desk_config();
    cfg.physics.epsilon = 0.1;
    cfg.physics.alpha = 0.5;
    cfg.time.t_end = 5.0;
    const Trajectory tr = evolve(initial_of(cfg), cfg.evolution_params(), quiet_observers(10));
    const double m0 = tr.records.front().total_mass;
    double worst = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
        const auto& r = tr.records[i];
        worst = std::max(worst, std::abs((m0 - r.total_mass) - r.ledger));
        if (i > 0 && r.total_mass > tr.records[i - 1].total_mass) monotone = false;
    }
    const double rel = worst / m0;
    CriterionResult c{3, "dissipation identity", rel <= 0.01 && monotone, "", {}};
    c.metrics = {{"max_ledger_gap_relative", rel},
                 {"mass_lost", m0 - tr.records.back().total_mass},
                 {"ledger", tr.records.back().ledger},
                 {"monotone", monotone},
                 {"tolerance", 0.01}};
    c.summary = "ledger gap " + fmt(rel) + " of initial mass, monotone=" + (monotone ? "yes" : "no");
    return c;
}

CriterionResult criterion_linear_oracle() {
    SimConfig cfg = desk_config();
    cfg.grid = {32, 16.0};
    cfg.physics.epsilon = 0.1;
    cfg.physics.alpha = 0.75;
    cfg.time.t_end = 2.0;
    cfg.initial = InitialRecipe{PlaneWaveStack{{{1, 2, 0}, {0, -3, 1}}, 1.0}, {1.0, 0.5}, true};
    EvolutionParams p = cfg.evolution_params();
    p.linear_only = true;
    const MixedState init = initial_of(cfg);
    const Grid3& grid = init.grid();
    const std::array<std::array<int, 3>, 2> modes{{{1, 2, 0}, {0, -3, 1}}};
    const Trajectory tr = evolve(init, p, quiet_observers(20));
    double worst = 0.0;
    for (const auto& r : tr.records)
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const double kk = grid.dk() * std::sqrt(double(modes[k][0] * modes[k][0] + modes[k][1] * modes[k][1] +
                                                           modes[k][2] * modes[k][2]));
            const double expected = tr.records.front().masses[k] * std::exp(-2.0 * p.epsilon * r.t * std::pow(kk, 2.0 * p.alpha));
            worst = std::max(worst, std::abs(r.masses[k] - expected) / expected);
        }
    const MixedState exact = exact_linear_flow(init, p, p.t_end);
    const double state_gap = weighted_distance(*tr.final_state, exact) / std::sqrt(weighted_mass(exact));
    CriterionResult c{4, "exact linear oracle", worst <= 1e-10, "", {}};
    c.metrics = {{"max_relative_mass_error", worst}, {"final_state_relative_gap", state_gap}, {"tolerance", 1e-10}};
    c.summary = "mass vs exp(-2 eps t |k0|^{2 alpha}) error " + fmt(worst);
    return c;
}

CriterionResult criterion_dichotomy() {
    const SimConfig cfg = collapse_config();
    const StudyReport rep = blowup_study(cfg, {0.0, 0.05, 0.1, 0.5}, false);
    bool ok = rep.zero_eps_blowup && rep.positive_eps_completed;
    double worst_ratio = 0.0;
    double sentinel_time = 0.0;
    for (const auto& r : rep.rows) {
        if (r.epsilon == 0.0) {
            sentinel_time = r.final_time;
            ok = ok && r.final_time <= cfg.time.t_end;
        } else {
            worst_ratio = std::max(worst_ratio, r.max_h_half_ratio);
        }
    }
    ok = ok && worst_ratio <= 5.0;
    CriterionResult c{5, "blow-up/arrest dichotomy", ok, "", rep.to_json()};
    c.metrics["horizon"] = cfg.time.t_end;
    c.metrics["max_h_half_ratio_dissipative"] = worst_ratio;
    std::ostringstream s;
    s << "E0=" << fmt(rep.energy0) << "; eps=0 " << (rep.zero_eps_blowup ? "sentinel at t=" + fmt(sentinel_time) : "no sentinel")
      << "; eps>0 " << (rep.positive_eps_completed ? "completed" : "not completed") << ", max h_half ratio "
      << fmt(worst_ratio);
    c.summary = s.str();
    return c;
}

CriterionResult criterion_dilation_equality() {
    const auto& cs = collapse_series();
    const double two_e = 2.0 * cs.energy0;
    auto worst_residual = [&](const std::vector<DiagnosticsRecord>& recs, std::size_t count, std::vector<double>* all) {
        std::vector<double> a;
        for (std::size_t i = 0; i < count; ++i) a.push_back(recs[i].dilation_a);
        const auto da = central_diff(a, cs.sample_dt);
        double worst = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < da.size(); ++i) {
            const double res = da[i] - (two_e - recs[i + 1].rest_term);
            if (all) all->push_back(res);
            worst = std::max(worst, std::abs(res));
            sq += res * res;
        }
        return std::pair{worst, std::sqrt(sq / std::max<std::size_t>(da.size(), 1))};
    };
    const std::size_t count = std::min(resolved_prefix(cs.coarse), cs.fine.size());
    std::vector<double> residuals;
    const auto [worst, rms] = worst_residual(cs.coarse, count, &residuals);
    const auto [worst_fine, rms_fine] = worst_residual(cs.fine, count, nullptr);
    const double rel = worst / std::abs(two_e);
    const bool ok = count >= 10 && rel <= 0.01 && rms_fine < rms;
    CriterionResult c{6, "dilation equality", ok, "", {}};
    c.metrics = {{"two_energy", two_e},
                 {"window_end", cs.coarse[count - 1].t},
                 {"window_rule", "tail_fraction <= 1e-3"},
                 {"max_residual_relative", rel},
                 {"rms_residual_dt", rms},
                 {"rms_residual_dt_half", rms_fine},
                 {"max_residual_relative_dt_half", worst_fine / std::abs(two_e)}};
    c.summary = "max |dA/dt - (2E - rest)| = " + fmt(rel) + " of |2E| on t <= " + fmt(cs.coarse[count - 1].t) +
                "; rms " + fmt(rms) + " -> " + fmt(rms_fine) + " under dt halving";
    return c;
}

CriterionResult criterion_variance_chain() {
    const auto& cs = collapse_series();
    const double two_e = 2.0 * cs.energy0;
    auto residual_sup = [&](const std::vector<DiagnosticsRecord>& recs, std::size_t count) {
        std::vector<double> m;
        for (std::size_t i = 0; i < count; ++i) m.push_back(recs[i].variance_m);
        const auto dm = central_diff(m, cs.sample_dt);
        double sup = 0.0;
        for (std::size_t i = 0; i < dm.size(); ++i) sup = std::max(sup, std::abs(dm[i] - 2.0 * recs[i + 1].dilation_a));
        return sup;
    };
    const std::size_t count = std::min(cs.coarse.size(), cs.fine.size());
    const double sup = residual_sup(cs.coarse, count);
    const double sup_fine = residual_sup(cs.fine, count);
    const double stability = std::abs(sup - sup_fine) / sup;

    bool nonneg = true;
    std::vector<double> t, m;
    for (std::size_t i = 0; i < count; ++i) {
        nonneg = nonneg && cs.coarse[i].variance_m >= 0.0;
        t.push_back(cs.coarse[i].t);
        m.push_back(cs.coarse[i].variance_m);
    }
    const auto coef = quadratic_fit(t, m);
    const double bound = two_e + 0.1 * std::abs(two_e);
    const double n_mass = cs.total_mass;
    // Newton bounds are judged while the potential is resolved; the full-run worst case is reported.
    const std::size_t resolved = std::max<std::size_t>(resolved_prefix(cs.coarse), 1);
    NewtonBoundCheck newton, newton_all;
    newton.radius = newton_all.radius = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cs.newton.size(); ++i) {
        auto& dst = i < resolved ? newton : newton_all;
        dst.max_rv = std::max(dst.max_rv, cs.newton[i].max_rv);
        dst.max_r2dv = std::max(dst.max_r2dv, cs.newton[i].max_r2dv);
        dst.radius = std::min(dst.radius, cs.newton[i].radius);
    }
    newton_all.max_rv = std::max(newton_all.max_rv, newton.max_rv);
    newton_all.max_r2dv = std::max(newton_all.max_r2dv, newton.max_r2dv);
    const double newton_worst = std::max(newton.max_rv, newton.max_r2dv);
    const double min_ball = 4.0 * cs.coarse_spacing;
    const bool newton_ok = resolved >= 10 && newton.radius >= min_ball && newton_worst <= n_mass * (1.0 + 1e-6);
    const bool ok = nonneg && coef[2] <= bound && newton_ok && stability <= 0.05;
    CriterionResult c{7, "variance chain", ok, "", {}};
    c.metrics = {{"sup_residual", sup},
                 {"sup_residual_dt_half", sup_fine},
                 {"sup_residual_dt_stability", stability},
                 {"sup_residual_over_mass_squared", sup / (n_mass * n_mass)},
                 {"m_nonnegative", nonneg},
                 {"quadratic_coefficients", coef},
                 {"leading_coefficient_bound", bound},
                 {"newton_max_r_v", newton.max_rv},
                 {"newton_max_r2_grad_v", newton.max_r2dv},
                 {"newton_window_end", cs.coarse[resolved - 1].t},
                 {"newton_min_ball_radius", newton.radius},
                 {"newton_max_r_v_full_run", newton_all.max_rv},
                 {"newton_max_r2_grad_v_full_run", newton_all.max_r2dv},
                 {"total_mass", n_mass},
                 {"window_end", cs.coarse[count - 1].t}};
    c.summary = "sup|dM/dt - 2A| = " + fmt(sup) + " (dt/2: " + fmt(sup_fine) + "); M >= 0 " + (nonneg ? "yes" : "no") +
                "; quadratic coefficient " + fmt(coef[2]) + " vs bound " + fmt(bound) + "; Newton max " +
                fmt(newton_worst) + " vs N=" + fmt(n_mass) + " on |x| < " + fmt(newton.radius) + ", t <= " +
                fmt(cs.coarse[resolved - 1].t) + " (full run " +
                fmt(std::max(newton_all.max_rv, newton_all.max_r2dv)) + ")";
    return c;
}

CriterionResult criterion_newton_oracle() {
    const Grid3 grid(64, 32.0);
    const double sigma = 1.0;
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -1.5);
    auto rho = [&](double r) { return norm * std::exp(-r * r / (2.0 * sigma * sigma)); };
    RVec dens(grid.size());
    const auto& x = grid.coord_axis();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflatten(i);
        dens[i] = rho(std::sqrt(x[idx[0]] * x[idx[0]] + x[idx[1]] * x[idx[1]] + x[idx[2]] * x[idx[2]]));
    }
    const RVec v = solve_potential(dens, grid, TruncatedKernel{0.5 * grid.box_length()});

    RadialProfile prof;
    const int nodes = 8001;
    for (int i = 0; i < nodes; ++i) {
        const double r = 0.5 * grid.box_length() * i / (nodes - 1);
        prof.radii.push_back(r);
        prof.values.push_back(rho(r));
    }
    std::vector<double> radii;
    std::vector<std::size_t> where;
    const double rmax = 0.25 * grid.box_length();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflatten(i);
        const double r = std::sqrt(x[idx[0]] * x[idx[0]] + x[idx[1]] * x[idx[1]] + x[idx[2]] * x[idx[2]]);
        if (r < rmax) {
            radii.push_back(r);
            where.push_back(i);
        }
    }
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const auto oracle_sorted = newton_radial_potential(prof, sorted);
    double gap = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        const auto pos = std::lower_bound(sorted.begin(), sorted.end(), radii[j]) - sorted.begin();
        gap = std::max(gap, std::abs(v[where[j]] - oracle_sorted[pos]));
        scale = std::max(scale, std::abs(oracle_sorted[pos]));
    }
    const double rel = gap / scale;
    const double total = integrate(grid, dens);
    const auto nb = newton_bounds(v, dens, grid);
    const bool bounds_ok = nb.max_rv <= total * (1.0 + 1e-6) && nb.max_r2dv <= total * (1.0 + 1e-6);
    CriterionResult c{8, "Newton oracle agreement", rel <= 1e-3 && bounds_ok, "", {}};
    c.metrics = {{"relative_linf_gap", rel},
                 {"tolerance", 1e-3},
                 {"probe_points", radii.size()},
                 {"total_mass", total},
                 {"max_r_abs_v", nb.max_rv},
                 {"max_r2_grad_v", nb.max_r2dv}};
    c.summary = "relative L-inf gap " + fmt(rel) + " on |x| < L/4; max r|V| " + fmt(nb.max_rv) + ", max r^2|grad V| " +
                fmt(nb.max_r2dv) + " vs M=" + fmt(total);
    return c;
}

CriterionResult criterion_kernel_exponents() {
    const Grid3 grid(128, 64.0);
    bool ok = true;
    json decay = json::array();
    double worst = 0.0;
    for (const auto& lp : standard_decay_matrix(grid)) {
        const bool zero_slope = lp.probe.r == lp.probe.p && lp.probe.nu == 0.0;
        const double tol = zero_slope ? 0.02 : 0.05;
        json entry;
        try {
            const DecayFit fit = decay_exponent_fit(grid, lp.probe);
            entry = to_json(fit, tol);
            entry.erase("series");
            if (!zero_slope) worst = std::max(worst, fit.relative_gap);
            ok = ok && fit.relative_gap <= tol;
        } catch (const std::runtime_error& e) {
            entry = {{"pass", false}, {"error", e.what()}};
            ok = false;
        }
        entry["label"] = lp.label;
        decay.push_back(entry);
    }
    json duhamel = json::array();
    double worst_d = 0.0;
    for (const auto& lp : standard_duhamel_probes(grid)) {
        const DuhamelFit fit = duhamel_scaling_probe(grid, lp.probe);
        json entry = to_json(fit, 0.10);
        entry["label"] = lp.label;
        duhamel.push_back(entry);
        worst_d = std::max(worst_d, fit.relative_gap);
        ok = ok && fit.relative_gap <= 0.10;
    }
    CriterionResult c{9, "kernel decay exponents", ok, "", {}};
    c.metrics = {{"decay", decay}, {"duhamel", duhamel}, {"decay_tolerance", 0.05}, {"duhamel_tolerance", 0.10}};
    c.summary = "worst decay gap " + fmt(worst) + " over " + std::to_string(decay.size()) + " probes; worst Duhamel gap " +
                fmt(worst_d);
    return c;
}

CriterionResult criterion_orthonormality() {
    const auto& run = conservation_run();
    // informational: Gram drift with dissipation
    SimConfig cfg = desk_config();
    cfg.physics.epsilon = 0.1;
    cfg.initial = InitialRecipe{RadialGaussianStack{{1.0, 1.5}, 1.0, true}, {1.0, 0.5}, true};
    cfg.time.t_end = 2.0;
    const MixedState init = initial_of(cfg);
    const Trajectory tr = evolve(init, cfg.evolution_params(), quiet_observers(100));
    const double diss_drift = gram_matrix(*tr.final_state).max_deviation(gram_matrix(init));
    CriterionResult c{10, "orthonormality transport", run.gram_drift <= 1e-8, "", {}};
    c.metrics = {{"gram_drift", run.gram_drift},
                 {"steps", run.steps},
                 {"tolerance", 1e-8},
                 {"gram_drift_dissipative_informational", diss_drift},
                 {"dissipative_epsilon", 0.1},
                 {"dissipative_t_end", 2.0}};
    c.summary = "Gram drift " + fmt(run.gram_drift) + " over " + std::to_string(run.steps) +
                " steps; eps=0.1 drift " + fmt(diss_drift) + " (informational)";
    return c;
}

CriterionResult criterion_convergence() {
    SimConfig cfg = desk_config();
    cfg.grid = {32, 16.0};
    cfg.initial = InitialRecipe{RadialGaussianStack{{1.0}, 1.5, true}, {1.0}, true};
    cfg.time.t_end = 0.4;
    const MixedState init = initial_of(cfg);
    EvolutionParams strang = cfg.evolution_params();
    EvolutionParams lie = strang;
    lie.splitting = Splitting::Lie;
    const std::vector<double> dts{0.04, 0.02, 0.01};
    const auto rs = convergence_study(init, strang, dts, 16);
    const auto rl = convergence_study(init, lie, dts, 16);
    const bool ok = rs.order >= 1.8 && rs.order <= 2.2 && rl.order >= 0.8 && rl.order <= 1.2;
    CriterionResult c{11, "convergence", ok, "", {}};
    auto rows = [](const ConvergenceResult& r) {
        json a = json::array();
        for (const auto& row : r.rows) a.push_back({{"dt", row.dt}, {"error", row.error}});
        return a;
    };
    c.metrics = {{"strang_order", rs.order},
                 {"lie_order", rl.order},
                 {"strang_rows", rows(rs)},
                 {"lie_rows", rows(rl)},
                 {"reference_dt", rs.reference_dt}};
    c.summary = "Strang order " + fmt(rs.order) + ", Lie order " + fmt(rl.order);
    return c;
}

json SuiteReport::to_json() const {
    json crit = json::array();
    for (const auto& c : criteria)
        crit.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"summary", c.summary}, {"metrics", c.metrics}});
    return {{"suite", suite}, {"pass", pass}, {"criteria", crit}};
}

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"conservation", "dissipation", "virial",     "kernel",
                                                "potential-oracle", "convergence", "dichotomy"};
    return names;
}

SuiteReport verify(const std::string& suite) {
    SuiteReport rep;
    rep.suite = suite;
    if (suite == "conservation") {
        rep.criteria = {criterion_charge_conservation(), criterion_energy_conservation(), criterion_orthonormality()};
    } else if (suite == "dissipation") {
        rep.criteria = {criterion_dissipation_identity(), criterion_linear_oracle()};
    } else if (suite == "virial") {
        rep.criteria = {criterion_dilation_equality(), criterion_variance_chain()};
    } else if (suite == "kernel") {
        rep.criteria = {criterion_kernel_exponents()};
    } else if (suite == "potential-oracle") {
        rep.criteria = {criterion_newton_oracle()};
    } else if (suite == "convergence") {
        rep.criteria = {criterion_convergence()};
    } else if (suite == "dichotomy") {
        rep.criteria = {criterion_dichotomy()};
    } else {
        throw std::invalid_argument("unknown verify suite '" + suite + "'");
    }
    rep.pass = std::all_of(rep.criteria.begin(), rep.criteria.end(), [](const auto& c) { return c.pass; });
    return rep;
}

}  // namespace sps
