#include "sps/semigroup_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace sps {

namespace {

constexpr double kPi = std::numbers::pi;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = m * sxx - sx * sx;
    if (den == 0.0) throw std::runtime_error("fit: degenerate abscissae");
    LineFit f;
    f.slope = (m * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / m;
    return f;
}

double relative_gap(double fitted, double predicted) {
    return predicted == 0.0 ? std::abs(fitted) : std::abs(fitted - predicted) / std::abs(predicted);
}

// Fourier coefficients of a profile centred on the grid origin (index n/2 on each axis).
CVec centred_spectrum(const Grid3& grid, const std::function<double(double)>& radial) {
    const int n = grid.n();
    CVec out(grid.size());
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l, ++idx) {
                // shifting the origin by n/2 cells multiplies mode m by (-1)^m
                const double sign = ((i + j + l) % 2 == 0) ? 1.0 : -1.0;
                out[idx] = sign * radial(grid.kabs(idx));
            }
    return out;
}

}  // namespace

Multiplier heat_symbol(const Grid3& grid, double t, double alpha) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: t must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("heat_semigroup: alpha must be > 0");
    return Multiplier::from_radial(grid, [=](double k) {
        if (t == 0.0 || k == 0.0) return cplx{1.0, 0.0};
        return cplx{std::exp(-t * std::pow(k, 2.0 * alpha)), 0.0};
    });
}

Field heat_semigroup_apply(const Field& f, double t, double alpha) {
    return apply_multiplier(f, heat_symbol(f.grid(), t, alpha));
}

Field scale_invariant_profile(const Grid3& grid, double r) {
    if (!(r >= 1.0)) throw std::invalid_argument("scale_invariant_profile: r must be >= 1");
    const double power = -3.0 * (1.0 - 1.0 / r);
    const double inv_vol = 1.0 / grid.cell_volume();
    Field coeffs(grid, centred_spectrum(grid, [&](double k) {
                     if (k == 0.0) return power == 0.0 ? inv_vol : 0.0;
                     return inv_vol * std::pow(k, power);
                 }));
    return inverse_transform(coeffs);
}

Field unit_mass_gaussian(const Grid3& grid, double sigma) {
    const double norm = std::pow(2.0 * kPi * sigma * sigma, -1.5);
    return Field::from_function(grid, [&](double x, double y, double z) {
        return cplx{norm * std::exp(-(x * x + y * y + z * z) / (2.0 * sigma * sigma)), 0.0};
    });
}

double predicted_decay_slope(double alpha, double nu, double r, double p) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    return -nu / (2.0 * alpha) - 3.0 / (2.0 * alpha) * (1.0 / r - inv_p);
}

double infrared_box_limit(double alpha, double nu, double r) {
    const double e = nu - 3.0 * (1.0 - 1.0 / r);
    const double scale = e >= 0.0 ? 0.7 : (e >= -1.0 ? 0.3 : 0.15);
    return std::pow(scale, 2.0 * alpha);
}

std::vector<LabeledDecayProbe> standard_decay_matrix(const Grid3& grid, int samples) {
    std::vector<LabeledDecayProbe> out;
    const double h = grid.spacing();
    const double box_scale = grid.box_length() / (2.0 * kPi);
    for (double alpha : {0.5, 0.75, 1.0})
        for (double nu : {0.0, 1.0})
            for (auto [r, p] : {std::pair{1.0, kInf}, std::pair{2.0, 2.0}, std::pair{2.0, 6.0}}) {
                DecayProbe pr;
                pr.alpha = alpha;
                pr.nu = nu;
                pr.r = r;
                pr.p = p;
                if (r == p && nu == 0.0) {
                    pr.data = ProbeData::PeakedGaussian;
                    const double sigma = pr.gaussian_sigma_cells * h;
                    pr.t_samples = geometric_times(1e-3 * std::pow(sigma, 2.0 * alpha), 2e-2 * std::pow(sigma, 2.0 * alpha), samples);
                } else {
                    pr.box_limit = infrared_box_limit(alpha, nu, r);
                    pr.t_samples = geometric_times(std::pow(h, 2.0 * alpha), std::pow(0.7 * box_scale, 2.0 * alpha), samples);
                }
                std::ostringstream label;
                label << "alpha=" << alpha << ",nu=" << nu << ",r=" << r << ",p=" << (std::isinf(p) ? "inf" : std::to_string(static_cast<int>(p)));
                out.push_back({label.str(), pr});
            }
    return out;
}

std::vector<double> geometric_times(double t_min, double t_max, int count) {
    if (!(t_min > 0.0 && t_max > t_min) || count < 2) throw std::invalid_argument("geometric_times: bad range");
    std::vector<double> out(count);
    const double ratio = std::log(t_max / t_min) / (count - 1);
    for (int i = 0; i < count; ++i) out[i] = t_min * std::exp(ratio * i);
    return out;
}

DecayFit decay_exponent_fit(const Grid3& grid, const DecayProbe& probe) {
    if (!(probe.alpha > 0.0) || !(probe.nu >= 0.0)) throw std::invalid_argument("decay probe: bad alpha/nu");
    if (!(probe.r >= 1.0) || !(probe.p >= probe.r)) throw std::invalid_argument("decay probe: need 1 <= r <= p");
    for (std::size_t i = 1; i < probe.t_samples.size(); ++i)
        if (!(probe.t_samples[i] > probe.t_samples[i - 1]))
            throw std::invalid_argument("decay probe: t_samples must be strictly increasing");

    const Field f = probe.data == ProbeData::ScaleInvariant
                        ? scale_invariant_profile(grid, probe.r)
                        : unit_mass_gaussian(grid, probe.gaussian_sigma_cells * grid.spacing());
    const Field fhat = forward_transform(f);

    const double kmin = grid.dk();
    const double knyq = grid.nyquist();
    DecayFit fit;
    fit.predicted_slope = predicted_decay_slope(probe.alpha, probe.nu, probe.r, probe.p);

    const std::size_t size = grid.size();
    RVec lam(size), weight(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double k = grid.kabs(i);
        lam[i] = k > 0.0 ? std::pow(k, 2.0 * probe.alpha) : 0.0;
        weight[i] = k > 0.0 ? std::pow(k, probe.nu) : (probe.nu == 0.0 ? 1.0 : 0.0);
    }

    std::vector<double> xs, ys;
    Field work(grid);
    for (double t : probe.t_samples) {
        double tail = 0.0, total = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            work[i] = weight[i] * std::exp(-t * lam[i]) * fhat[i];
            const double e = std::norm(work[i]);
            total += e;
            if (grid.kabs(i) > knyq) tail += e;
        }
        const double tail_share = total > 0.0 ? tail / total : 0.0;
        const bool in_window = total > 0.0 && tail_share < probe.tail_tol &&
                               t * std::pow(kmin, 2.0 * probe.alpha) <= probe.box_limit;
        // norms outside the window are not needed for the fit
        const double nrm = in_window ? lp_norm(inverse_transform(work), probe.p) : 0.0;
        const bool usable = in_window && nrm > 0.0;
        fit.samples.push_back({t, nrm, tail_share, usable});
        if (usable) {
            xs.push_back(std::log(t));
            ys.push_back(std::log(nrm));
        }
    }
    fit.used = xs.size();
    if (fit.used < 5) {
        std::ostringstream os;
        os << "decay fit: only " << fit.used << " usable samples (need 5)";
        throw std::runtime_error(os.str());
    }
    fit.fitted_slope = least_squares(xs, ys).slope;
    fit.relative_gap = relative_gap(fit.fitted_slope, fit.predicted_slope);
    return fit;
}

TripletCheck admissible_triplet_check(double q, double p, double r, double alpha, double tol) {
    constexpr double n = 3.0;
    TripletCheck out;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    out.q_expected_inverse = n / (2.0 * alpha) * (1.0 / r - inv_p);
    out.scaling_ok = std::abs(inv_q - out.q_expected_inverse) <= tol;
    const double p_cap = n > 2.0 * alpha ? n * r / (n - 2.0 * alpha) : kInf;
    out.range_ok = r > 1.0 && r <= p && p < p_cap;
    out.admissible = out.scaling_ok && out.range_ok;
    if (!out.scaling_ok && !out.range_ok) out.failure = "scaling,range";
    else if (!out.scaling_ok) out.failure = "scaling";
    else if (!out.range_ok) out.failure = "range";
    return out;
}

double predicted_duhamel_exponent(double alpha, double nu, double b, double r) {
    return 1.0 - 3.0 * b / (2.0 * r * alpha) - nu / (2.0 * alpha);
}

std::vector<LabeledDuhamel> standard_duhamel_probes(const Grid3& grid, int samples) {
    std::vector<LabeledDuhamel> out;
    for (auto [alpha, nu, b, label] : {std::tuple{1.0, 0.2, 0.7, "alpha=1,nu=0.2,b=0.7"},
                                       std::tuple{0.75, 0.0, 0.55, "alpha=0.75,nu=0,b=0.55"}}) {
        DuhamelProbe p;
        p.alpha = alpha;
        p.nu = nu;
        p.b = b;
        const double unit = std::pow(grid.dk(), -2.0 * alpha);
        p.T_samples = geometric_times(0.01 * unit, 0.2 * unit, samples);
        out.push_back({label, p});
    }
    return out;
}

namespace {

// Exact integrals of exp(-(D - s) lam) times the linear hat functions on [0, D].
void panel_weights(double lam, double d, double& w_left, double& w_right) {
    const double z = lam * d;
    if (z < 1e-4) {
        w_left = d * (0.5 - z / 3.0 + z * z / 8.0);
        w_right = d * (0.5 - z / 6.0 + z * z / 24.0);
        return;
    }
    const double em = std::expm1(-z);
    w_left = d * (-em - z * std::exp(-z)) / (z * z);
    w_right = d * (z + em) / (z * z);
}

}  // namespace

DuhamelFit duhamel_scaling_probe(const Grid3& grid, const DuhamelProbe& pr) {
    const double inv_p = 1.0 / pr.p;
    const double inv_q = 3.0 / (2.0 * pr.alpha) * (1.0 / pr.r - inv_p);
    const double q = inv_q == 0.0 ? kInf : 1.0 / inv_q;
    const auto triplet = admissible_triplet_check(q, pr.p, pr.r, pr.alpha);
    const double r0 = 3.0 * pr.b / (2.0 * pr.alpha);
    const bool inside = pr.b > 0.0 && pr.p > pr.b + 1.0 && pr.p < pr.r * (pr.b + 1.0) && pr.r >= r0 && r0 > 1.0;
    if (pr.enforce_hypotheses && !triplet.admissible)
        throw std::invalid_argument("duhamel probe: (q,p,r) not admissible: " + triplet.failure);
    if (pr.enforce_hypotheses && !inside)
        throw std::invalid_argument("duhamel probe: outside hypotheses p > b+1, p < r(b+1), r >= r0 > 1");
    DuhamelFit fit;
    fit.predicted_exponent = predicted_duhamel_exponent(pr.alpha, pr.nu, pr.b, pr.r);
    if (!(fit.predicted_exponent > 0.0)) throw std::invalid_argument("duhamel probe: predicted exponent must be positive");
    if (pr.T_samples.size() < 3) throw std::invalid_argument("duhamel probe: need >= 3 T samples");

    // f0 homogeneous of degree -3(b+1)/p, i.e. spectral power -3 + 3(b+1)/p.
    const double power = -3.0 + 3.0 * (pr.b + 1.0) / pr.p;
    const CVec f0 = centred_spectrum(grid, [&](double k) { return k == 0.0 ? 0.0 : std::pow(k, power); });
    const std::size_t size = grid.size();
    RVec lam(size), nu_sym(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double k = grid.kabs(i);
        lam[i] = k == 0.0 ? 0.0 : std::pow(k, 2.0 * pr.alpha);
        nu_sym[i] = k == 0.0 ? (pr.nu == 0.0 ? 1.0 : 0.0) : std::pow(k, pr.nu);
    }
    auto forcing = [&](double s) { return 1.0 + pr.time_variation * std::sin(s); };
    const bool plancherel = pr.r == 2.0;
    const double fnorm = grid.cell_volume() / static_cast<double>(size);

    auto norm_of = [&](const CVec& u) {
        if (plancherel) {
            double acc = 0.0;
            for (std::size_t i = 0; i < size; ++i) acc += std::norm(nu_sym[i] * u[i]);
            return std::sqrt(acc * fnorm);
        }
        Field coeffs(grid);
        for (std::size_t i = 0; i < size; ++i) coeffs[i] = nu_sym[i] * u[i];
        return lp_norm(inverse_transform(coeffs), pr.r);
    };

    auto sup_norm = [&](double T, int panels) {
        const double d = T / panels;
        CVec u(size, cplx{0.0, 0.0});
        RVec decay(size), wl(size), wr(size);
        for (std::size_t i = 0; i < size; ++i) {
            decay[i] = std::exp(-lam[i] * d);
            panel_weights(lam[i], d, wl[i], wr[i]);
        }
        double best = 0.0;
        for (int j = 0; j < panels; ++j) {
            const double g0 = forcing(j * d), g1 = forcing((j + 1) * d);
            for (std::size_t i = 0; i < size; ++i) u[i] = decay[i] * u[i] + (wl[i] * g0 + wr[i] * g1) * f0[i];
            best = std::max(best, norm_of(u));
        }
        return best;
    };

    std::vector<double> xs, ys;
    for (double T : pr.T_samples) {
        if (!(T > 0.0)) throw std::invalid_argument("duhamel probe: T must be positive");
        int panels = pr.panels;
        double prev = sup_norm(T, panels);
        double cur = sup_norm(T, 2 * panels);
        while (std::abs(cur - prev) > 0.01 * std::abs(cur)) {
            panels *= 2;
            if (panels > 8192) throw std::runtime_error("duhamel probe: time quadrature did not converge");
            prev = cur;
            cur = sup_norm(T, 2 * panels);
        }
        fit.samples.push_back({T, cur, 2 * panels});
        xs.push_back(std::log(T));
        ys.push_back(std::log(cur));
    }
    fit.fitted_exponent = least_squares(xs, ys).slope;
    fit.relative_gap = relative_gap(fit.fitted_exponent, fit.predicted_exponent);
    return fit;
}

namespace {

// J(X) = int_0^X u^{1-gamma} sin(u) du on a uniform table, linear interpolation between nodes.
class SineMomentTable {
public:
    SineMomentTable(double gamma, double x_max) : gamma_(gamma), step_(2e-3) {
        const std::size_t m = static_cast<std::size_t>(std::ceil(x_max / step_)) + 2;
        values_.assign(m, 0.0);
        auto f = [&](double u) { return std::pow(u, 1.0 - gamma) * std::sin(u); };
        // first panel from the series u^{2-gamma} (1 - u^2/6)
        const double u1 = step_;
        values_[1] = std::pow(u1, 3.0 - gamma) / (3.0 - gamma) - std::pow(u1, 5.0 - gamma) / (6.0 * (5.0 - gamma));
        for (std::size_t i = 2; i < m; ++i) {
            const double a = (i - 1) * step_, b = i * step_;
            values_[i] = values_[i - 1] + (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        }
    }
    double operator()(double x) const {
        const double pos = x / step_;
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= values_.size()) return values_.back();
        const double w = pos - i;
        return (1.0 - w) * values_[i] + w * values_[i + 1];
    }

private:
    double gamma_;
    double step_;
    std::vector<double> values_;
};

}  // namespace

double hardy_probe(const Field& u, double gamma) {
    if (!(gamma > 0.0 && gamma < 3.0)) throw std::invalid_argument("hardy_probe: gamma must lie in (0,3)");
    const Grid3& grid = u.grid();
    const std::size_t size = grid.size();
    const Field uhat = forward_transform(u);
    const double fnorm = grid.cell_volume() / static_cast<double>(size);
    double denom = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double k = grid.kabs(i);
        if (k > 0.0) denom += std::pow(k, gamma) * std::norm(uhat[i]);
    }
    denom *= fnorm;
    if (denom == 0.0) return 0.0;

    const double radius = 0.5 * grid.box_length();
    double kmax = 0.0;
    for (std::size_t i = 0; i < size; ++i) kmax = std::max(kmax, grid.kabs(i));
    const SineMomentTable table(gamma, kmax * radius);

    Field dens(grid);
    for (std::size_t i = 0; i < size; ++i) dens[i] = std::norm(u[i]);
    Field spec = forward_transform(dens);
    for (std::size_t i = 0; i < size; ++i) {
        const double k = grid.kabs(i);
        const double kernel = k == 0.0 ? 4.0 * kPi * std::pow(radius, 3.0 - gamma) / (3.0 - gamma)
                                       : 4.0 * kPi * std::pow(k, gamma - 3.0) * table(k * radius);
        spec[i] *= kernel;
    }
    const Field conv = inverse_transform(spec);
    double sup = 0.0;
    for (const auto& v : conv.values()) sup = std::max(sup, v.real());
    return sup / denom;
}

nlohmann::json to_json(const DecayFit& fit, double tolerance) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : fit.samples) series.push_back({{"t", s.t}, {"norm", s.norm}, {"tail", s.tail}, {"usable", s.usable}});
    const bool absolute = fit.predicted_slope == 0.0;
    return {{"predicted", fit.predicted_slope},
            {"fitted", fit.fitted_slope},
            {"gap", fit.relative_gap},
            {"gap_kind", absolute ? "absolute" : "relative"},
            {"pass", fit.relative_gap <= tolerance},
            {"used_samples", fit.used},
            {"series", series}};
}

nlohmann::json to_json(const DuhamelFit& fit, double tolerance) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : fit.samples) series.push_back({{"T", s.T}, {"sup_norm", s.sup_norm}, {"panels", s.panels_used}});
    return {{"predicted", fit.predicted_exponent},
            {"fitted", fit.fitted_exponent},
            {"gap", fit.relative_gap},
            {"pass", fit.relative_gap <= tolerance},
            {"series", series}};
}

}  // namespace sps
