#include "sps/diagnostics.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sps/spectral.hpp"

namespace sps {

std::string csv_header(std::size_t rank) {
    std::ostringstream os;
    os << "t";
    for (std::size_t k = 1; k <= rank; ++k) os << ",mass_" << k;
    os << ",total_mass,energy,kinetic_part,potential_part,h_half,h_half_hom,ledger,variance_m,"
          "dilation_a,rest_term,moment1,moment2,tail_fraction";
    return os.str();
}

std::string to_csv_row(const DiagnosticsRecord& r) {
    std::ostringstream os;
    os << std::setprecision(17) << r.t;
    for (double m : r.masses) os << ',' << m;
    os << ',' << r.total_mass << ',' << r.energy << ',' << r.kinetic_part << ',' << r.potential_part << ','
       << r.h_half << ',' << r.h_half_hom << ',' << r.ledger << ',' << r.variance_m << ',' << r.dilation_a << ','
       << r.rest_term << ',' << r.moment1 << ',' << r.moment2 << ',' << r.tail_fraction;
    return os.str();
}

nlohmann::json to_json(const DiagnosticsRecord& r) {
    return nlohmann::json{{"t", r.t},
                          {"masses", r.masses},
                          {"total_mass", r.total_mass},
                          {"energy", r.energy},
                          {"kinetic_part", r.kinetic_part},
                          {"potential_part", r.potential_part},
                          {"h_half", r.h_half},
                          {"h_half_hom", r.h_half_hom},
                          {"ledger", r.ledger},
                          {"variance_m", r.variance_m},
                          {"dilation_a", r.dilation_a},
                          {"rest_term", r.rest_term},
                          {"moment1", r.moment1},
                          {"moment2", r.moment2},
                          {"tail_fraction", r.tail_fraction}};
}

namespace {

double taper(double a, double inner, double outer) {
    if (a <= inner) return 1.0;
    if (a >= outer) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (a - inner) / (outer - inner)));
}

RVec radial_table(const Grid3& grid, const std::function<double(double)>& fn) {
    RVec out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(grid.kabs(i));
    return out;
}

}  // namespace

DiagnosticsEngine::DiagnosticsEngine(const Grid3& grid, double mass, KernelMode kernel, double alpha,
                                     WindowConfig window)
    : grid_(grid),
      mass_(mass),
      kernel_(kernel),
      alpha_(alpha),
      tail_cut_(2.0 / 3.0 * grid.nyquist()),
      coulomb_(coulomb_symbol(grid, kernel)) {
    if (!(mass >= 0.0)) throw std::invalid_argument("diagnostics: m must be >= 0");
    if (!(window.shell_fraction > 0.0 && window.shell_fraction < 1.0))
        throw std::invalid_argument("diagnostics: window shell fraction must be in (0,1)");
    const double m2 = mass * mass;
    omega_ = radial_table(grid, [m2](double k) { return std::sqrt(k * k + m2); });
    kabs_ = radial_table(grid, [](double k) { return k; });
    bessel_ = radial_table(grid, [](double k) { return std::sqrt(1.0 + k * k); });
    rest_ = radial_table(grid, [m2](double k) { return m2 == 0.0 ? 0.0 : m2 / std::sqrt(k * k + m2); });
    diss_ = radial_table(grid, [alpha](double k) { return k == 0.0 ? 0.0 : std::pow(k, 2.0 * alpha); });

    const int n = grid.n();
    const auto& kf = grid.freq_axis();
    const auto& x = grid.coord_axis();
    const double half = 0.5 * grid.box_length();
    const double inner = (1.0 - window.shell_fraction) * half;
    std::vector<double> w1(n);
    for (int i = 0; i < n; ++i) w1[i] = taper(std::abs(x[i]), inner, half);

    for (auto& a : kaxis_) a.resize(grid.size());
    for (auto& a : xwin_) a.resize(grid.size());
    r2win_.resize(grid.size());
    window_.resize(grid.size());
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l, ++idx) {
                const double w = w1[i] * w1[j] * w1[l];
                window_[idx] = w;
                xwin_[0][idx] = x[i] * w;
                xwin_[1][idx] = x[j] * w;
                xwin_[2][idx] = x[l] * w;
                r2win_[idx] = (x[i] * x[i] + x[j] * x[j] + x[l] * x[l]) * w * w;
                kaxis_[0][idx] = i == n / 2 ? 0.0 : kf[i];
                kaxis_[1][idx] = j == n / 2 ? 0.0 : kf[j];
                kaxis_[2][idx] = l == n / 2 ? 0.0 : kf[l];
            }
}

EnergyParts DiagnosticsEngine::energy(const MixedState& state) const {
    const double fnorm = grid_.cell_volume() / static_cast<double>(grid_.size());
    EnergyParts e;
    CVec coeffs(grid_.size());
    for (std::size_t k = 0; k < state.rank(); ++k) {
        grid_.fft().forward(state[k].data(), coeffs.data());
        double acc = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) acc += omega_[i] * std::norm(coeffs[i]);
        e.kinetic += 0.5 * state.weights()[k] * acc * fnorm;
    }
    const RVec n = density(state);
    const RVec v = solve_potential(n, coulomb_);
    double pot = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) pot += v[i] * n[i];
    e.potential = 0.25 * pot * grid_.cell_volume();
    e.total = e.kinetic + e.potential;
    return e;
}

DiagnosticsEngine::MomentsMA DiagnosticsEngine::variance_and_dilation(const MixedState& state) const {
    const double fnorm = grid_.cell_volume() / static_cast<double>(grid_.size());
    MomentsMA out;
    CVec coeffs(grid_.size()), work(grid_.size()), xcoeffs(grid_.size());
    for (std::size_t k = 0; k < state.rank(); ++k) {
        const auto& psi = state[k].values();
        grid_.fft().forward(psi.data(), coeffs.data());
        double m_acc = 0.0, a_acc = 0.0;
        for (int j = 0; j < 3; ++j) {
            const auto& xw = xwin_[j];
            const auto& kj = kaxis_[j];
            for (std::size_t i = 0; i < work.size(); ++i) work[i] = xw[i] * psi[i];
            grid_.fft().forward(work.data(), xcoeffs.data());
            for (std::size_t i = 0; i < work.size(); ++i) {
                m_acc += omega_[i] * std::norm(xcoeffs[i]);
                a_acc += kj[i] * (std::conj(xcoeffs[i]) * coeffs[i]).real();
            }
        }
        out.m += state.weights()[k] * m_acc * fnorm;
        out.a += state.weights()[k] * a_acc * fnorm;
    }
    return out;
}

double DiagnosticsEngine::variance_m(const MixedState& state) const { return variance_and_dilation(state).m; }
double DiagnosticsEngine::dilation_a(const MixedState& state) const { return variance_and_dilation(state).a; }

double DiagnosticsEngine::rest_term(const MixedState& state) const {
    const double fnorm = grid_.cell_volume() / static_cast<double>(grid_.size());
    CVec coeffs(grid_.size());
    double out = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k) {
        grid_.fft().forward(state[k].data(), coeffs.data());
        double acc = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) acc += rest_[i] * std::norm(coeffs[i]);
        out += state.weights()[k] * acc * fnorm;
    }
    return out;
}

double DiagnosticsEngine::moment(const MixedState& state, int j) const {
    if (j != 1 && j != 2) throw std::invalid_argument("moments: j must be 1 or 2");
    double out = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k) {
        const auto& psi = state[k].values();
        double acc = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double w = j == 1 ? r2win_[i] : r2win_[i] * r2win_[i];
            acc += w * std::norm(psi[i]);
        }
        out += state.weights()[k] * acc * grid_.cell_volume();
    }
    return out;
}

double DiagnosticsEngine::tail_fraction(const MixedState& state) const {
    CVec coeffs(grid_.size());
    double tail = 0.0, total = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k) {
        grid_.fft().forward(state[k].data(), coeffs.data());
        double t_acc = 0.0, all = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const double e = kabs_[i] * std::norm(coeffs[i]);
            all += e;
            if (kabs_[i] >= tail_cut_) t_acc += e;
        }
        tail += state.weights()[k] * t_acc;
        total += state.weights()[k] * all;
    }
    return total > 0.0 ? tail / total : 0.0;
}

double DiagnosticsEngine::dissipation_rate(const MixedState& state, double epsilon) const {
    if (epsilon == 0.0) return 0.0;
    const double fnorm = grid_.cell_volume() / static_cast<double>(grid_.size());
    CVec coeffs(grid_.size());
    double out = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k) {
        grid_.fft().forward(state[k].data(), coeffs.data());
        double acc = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) acc += diss_[i] * std::norm(coeffs[i]);
        out += state.weights()[k] * acc * fnorm;
    }
    return 2.0 * epsilon * out;
}

double DiagnosticsEngine::boundary_fraction(const MixedState& state) const {
    double outside = 0.0, total = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k) {
        const auto& psi = state[k].values();
        double o = 0.0, a = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double p = std::norm(psi[i]);
            a += p;
            if (window_[i] < 1.0) o += p;
        }
        outside += state.weights()[k] * o;
        total += state.weights()[k] * a;
    }
    return total > 0.0 ? outside / total : 0.0;
}

DiagnosticsRecord DiagnosticsEngine::sample(const MixedState& state, double t, double ledger) const {
    DiagnosticsRecord r;
    r.t = t;
    r.ledger = ledger;
    r.masses = component_masses(state);
    for (std::size_t k = 0; k < state.rank(); ++k) r.total_mass += state.weights()[k] * r.masses[k];

    const double fnorm = grid_.cell_volume() / static_cast<double>(grid_.size());
    CVec coeffs(grid_.size());
    double tail = 0.0, tail_total = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k) {
        grid_.fft().forward(state[k].data(), coeffs.data());
        double kin = 0.0, hh = 0.0, hom = 0.0, rest = 0.0, t_acc = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const double p = std::norm(coeffs[i]);
            kin += omega_[i] * p;
            hh += bessel_[i] * p;
            const double e = kabs_[i] * p;
            hom += e;
            rest += rest_[i] * p;
            if (kabs_[i] >= tail_cut_) t_acc += e;
        }
        const double w = state.weights()[k];
        r.kinetic_part += 0.5 * w * kin * fnorm;
        r.h_half += w * hh * fnorm;
        r.h_half_hom += w * hom * fnorm;
        r.rest_term += w * rest * fnorm;
        tail += w * t_acc;
        tail_total += w * hom;
    }
    r.h_half = std::sqrt(r.h_half);
    r.h_half_hom = std::sqrt(r.h_half_hom);
    r.tail_fraction = tail_total > 0.0 ? tail / tail_total : 0.0;

    const RVec n = density(state);
    const RVec v = solve_potential(n, coulomb_);
    double pot = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) pot += v[i] * n[i];
    r.potential_part = 0.25 * pot * grid_.cell_volume();
    r.energy = r.kinetic_part + r.potential_part;

    const auto ma = variance_and_dilation(state);
    r.variance_m = ma.m;
    r.dilation_a = ma.a;
    r.moment1 = moment(state, 1);
    r.moment2 = moment(state, 2);
    return r;
}

EnergyParts energy(const MixedState& state, double mass, const KernelMode& kernel) {
    return DiagnosticsEngine(state.grid(), mass, kernel).energy(state);
}

double variance_m(const MixedState& state, double mass) {
    return DiagnosticsEngine(state.grid(), mass, PeriodicKernel{}).variance_m(state);
}

double dilation_a(const MixedState& state) {
    return DiagnosticsEngine(state.grid(), 0.0, PeriodicKernel{}).dilation_a(state);
}

double rest_term(const MixedState& state, double mass) {
    return DiagnosticsEngine(state.grid(), mass, PeriodicKernel{}).rest_term(state);
}

double moments(const MixedState& state, int j) {
    return DiagnosticsEngine(state.grid(), 0.0, PeriodicKernel{}).moment(state, j);
}

double dissipation_ledger_update(double ledger, double rate_before, double rate_after, double dt) {
    return ledger + 0.5 * dt * (rate_before + rate_after);
}

MonitorVerdict blowup_monitor(const DiagnosticsRecord& record, double h_half_initial,
                              const MonitorThresholds& thresholds) {
    if (!std::isfinite(record.h_half) || !std::isfinite(record.tail_fraction))
        return {true, "non-finite diagnostics"};
    if (h_half_initial > 0.0 && record.h_half > thresholds.blowup_ratio * h_half_initial) {
        std::ostringstream os;
        os << "h_half ratio " << record.h_half / h_half_initial << " exceeds " << thresholds.blowup_ratio;
        return {true, os.str()};
    }
    if (record.tail_fraction > thresholds.tail_threshold) {
        std::ostringstream os;
        os << "tail_fraction " << record.tail_fraction << " exceeds " << thresholds.tail_threshold;
        return {true, os.str()};
    }
    return {false, {}};
}

}  // namespace sps
