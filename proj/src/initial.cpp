#include "sps/initial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sps {

namespace {

double radial_taper(double r, double inner, double outer) {
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (r - inner) / (outer - inner)));
}

}  // namespace

Field gaussian_field(const Grid3& grid, double sigma, std::array<double, 3> c, bool taper) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.75);
    const double inner = 0.25 * grid.box_length();
    const double outer = 0.5 * grid.box_length();
    return Field::from_function(grid, [&](double x, double y, double z) {
        const double dx = x - c[0], dy = y - c[1], dz = z - c[2];
        const double r2 = dx * dx + dy * dy + dz * dz;
        double v = norm * std::exp(-r2 / (4.0 * sigma * sigma));
        if (taper) v *= radial_taper(std::sqrt(r2), inner, outer);
        return cplx{v, 0.0};
    });
}

Field plane_wave(const Grid3& grid, std::array<int, 3> mode) {
    const double dk = grid.dk();
    const double amp = std::pow(grid.box_length(), -1.5);
    return Field::from_function(grid, [&](double x, double y, double z) {
        return std::polar(amp, dk * (mode[0] * x + mode[1] * y + mode[2] * z));
    });
}

MixedState build_initial_state(const Grid3& grid, const InitialRecipe& recipe) {
    for (double w : recipe.weights)
        if (!(w > 0.0)) throw std::invalid_argument("initial.weights must be positive");

    if (const auto* snap = std::get_if<FromSnapshot>(&recipe.kind)) {
        MixedState s = read_snapshot(snap->path);
        if (s.grid() != grid) throw std::invalid_argument("initial: snapshot grid does not match grid settings");
        return s;
    }

    std::vector<Field> comps;
    double amplitude = 1.0;
    if (const auto* g = std::get_if<RadialGaussianStack>(&recipe.kind)) {
        if (g->widths.empty()) throw std::invalid_argument("initial.widths must be non-empty");
        for (double s : g->widths) comps.push_back(gaussian_field(grid, s, {0.0, 0.0, 0.0}, g->taper));
        amplitude = g->amplitude;
    } else {
        const auto& pw = std::get<PlaneWaveStack>(recipe.kind);
        if (pw.modes.empty()) throw std::invalid_argument("initial.modes must be non-empty");
        for (const auto& m : pw.modes) comps.push_back(plane_wave(grid, m));
        amplitude = pw.amplitude;
    }
    if (!(amplitude > 0.0)) throw std::invalid_argument("initial.amplitude must be positive");
    if (recipe.weights.size() != comps.size())
        throw std::invalid_argument("initial.weights must have one entry per component");

    if (recipe.orthonormalize) {
        orthonormalize(comps);
    } else {
        for (auto& c : comps) c *= 1.0 / std::sqrt(norm2(c));
    }
    std::vector<double> weights = recipe.weights;
    for (auto& w : weights) w *= amplitude * amplitude;
    return MixedState(std::move(comps), std::move(weights));
}

}  // namespace sps
