#include "sps/hartree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sps {

namespace {
constexpr double kPi = std::numbers::pi;
}

KernelMode default_kernel(const Grid3& grid) { return TruncatedKernel{0.5 * grid.box_length()}; }

void validate_kernel(const KernelMode& mode, const Grid3& grid) {
    if (const auto* t = std::get_if<TruncatedKernel>(&mode)) {
        if (!(t->radius > 0.0)) throw std::invalid_argument("kernel: truncation radius must be positive");
        if (t->radius > grid.box_length() * std::sqrt(3.0) / 2.0 * (1.0 + 1e-12))
            throw std::invalid_argument("kernel: truncation radius exceeds L*sqrt(3)/2");
    }
}

Multiplier coulomb_symbol(const Grid3& grid, const KernelMode& mode) {
    validate_kernel(mode, grid);
    if (std::holds_alternative<PeriodicKernel>(mode)) {
        return Multiplier::from_radial(grid, [](double k) {
            if (k == 0.0) return cplx{0.0, 0.0};  // mean-zero gauge
            return cplx{-4.0 * kPi / (k * k), 0.0};
        });
    }
    const double r = std::get<TruncatedKernel>(mode).radius;
    return Multiplier::from_radial(grid, [r](double k) {
        if (k == 0.0) return cplx{-2.0 * kPi * r * r, 0.0};
        // 1 - cos(x) = 2 sin^2(x/2) avoids cancellation at small R|k|.
        const double s = std::sin(0.5 * r * k);
        return cplx{-8.0 * kPi * s * s / (k * k), 0.0};
    });
}

RVec solve_potential(const RVec& density, const Multiplier& coulomb) {
    const Grid3& grid = coulomb.grid();
    if (density.size() != grid.size()) throw std::invalid_argument("solve_potential: density size mismatch");
    CVec work(grid.size()), spec(grid.size());
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = cplx{density[i], 0.0};
    grid.fft().forward(work.data(), spec.data());
    const auto& sym = coulomb.symbol();
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= sym[i];
    grid.fft().inverse(spec.data(), work.data());
    RVec v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = work[i].real();
    return v;
}

RVec solve_potential(const RVec& density, const Grid3& grid, const KernelMode& mode) {
    return solve_potential(density, coulomb_symbol(grid, mode));
}

namespace {

struct RadialTables {
    std::vector<double> inner;  // 4pi int_0^{r_i} rho s^2 ds
    std::vector<double> outer;  // 4pi int_{r_i}^{r_last} rho s ds
};

void check_profile(const RadialProfile& p) {
    if (p.radii.size() != p.values.size() || p.radii.size() < 2)
        throw std::invalid_argument("newton_radial_potential: need >= 2 matching radii/values");
    if (p.radii.front() < 0.0) throw std::invalid_argument("newton_radial_potential: negative radius");
    for (std::size_t i = 1; i < p.radii.size(); ++i)
        if (!(p.radii[i] > p.radii[i - 1]))
            throw std::invalid_argument("newton_radial_potential: radii must be strictly increasing");
    for (double v : p.values)
        if (v < 0.0) throw std::invalid_argument("newton_radial_potential: density must be nonnegative");
}

RadialTables build_tables(const RadialProfile& p) {
    const auto& r = p.radii;
    const auto& rho = p.values;
    const std::size_t m = r.size();
    RadialTables t{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    // Core [0, r_0] treated as constant density rho_0.
    t.inner[0] = 4.0 * kPi * rho[0] * r[0] * r[0] * r[0] / 3.0;
    for (std::size_t i = 1; i < m; ++i) {
        const double h = r[i] - r[i - 1];
        t.inner[i] = t.inner[i - 1] + 4.0 * kPi * 0.5 * h * (rho[i - 1] * r[i - 1] * r[i - 1] + rho[i] * r[i] * r[i]);
    }
    for (std::size_t i = m - 1; i-- > 0;) {
        const double h = r[i + 1] - r[i];
        t.outer[i] = t.outer[i + 1] + 4.0 * kPi * 0.5 * h * (rho[i] * r[i] + rho[i + 1] * r[i + 1]);
    }
    return t;
}

// (inner mass, outer integral) at an arbitrary radius.
std::pair<double, double> evaluate(const RadialProfile& p, const RadialTables& t, double x) {
    const auto& r = p.radii;
    const auto& rho = p.values;
    if (x >= r.back()) return {t.inner.back(), 0.0};
    if (x <= r.front()) {
        const double core_inner = 4.0 * kPi * rho[0] * x * x * x / 3.0;
        const double core_outer = 4.0 * kPi * rho[0] * 0.5 * (r[0] * r[0] - x * x);
        return {core_inner, t.outer[0] + core_outer};
    }
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
    const double w = (x - r[i]) / (r[i + 1] - r[i]);
    const double rho_x = (1.0 - w) * rho[i] + w * rho[i + 1];
    const double h1 = x - r[i];
    const double h2 = r[i + 1] - x;
    const double inner = t.inner[i] + 4.0 * kPi * 0.5 * h1 * (rho[i] * r[i] * r[i] + rho_x * x * x);
    const double outer = t.outer[i + 1] + 4.0 * kPi * 0.5 * h2 * (rho_x * x + rho[i + 1] * r[i + 1]);
    return {inner, outer};
}

}  // namespace

std::vector<double> newton_radial_potential(const RadialProfile& density, std::span<const double> eval_radii) {
    check_profile(density);
    const auto tables = build_tables(density);
    std::vector<double> out;
    out.reserve(eval_radii.size());
    for (double x : eval_radii) {
        if (x < 0.0) throw std::invalid_argument("newton_radial_potential: negative evaluation radius");
        const auto [inner, outer] = evaluate(density, tables, x);
        out.push_back(x > 0.0 ? -inner / x - outer : -outer);
    }
    return out;
}

std::vector<double> enclosed_mass(const RadialProfile& density, std::span<const double> eval_radii) {
    check_profile(density);
    const auto tables = build_tables(density);
    std::vector<double> out;
    out.reserve(eval_radii.size());
    for (double x : eval_radii) out.push_back(evaluate(density, tables, x).first);
    return out;
}

}  // namespace sps
