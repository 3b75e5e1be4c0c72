#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "sps/mixed_state.hpp"

namespace sps {

// Spherically symmetric Gaussians psi_k ~ exp(-r^2 / (4 sigma_k^2)) (density width sigma_k),
// multiplied by a cosine taper from r = L/4 to r = L/2 so samples vanish well inside the box.
struct RadialGaussianStack {
    std::vector<double> widths;
    double amplitude = 1.0;  // state weights become amplitude^2 * lambda_k
    bool taper = true;
};

// e^{i k.x} / L^{3/2}, k = (2pi/L) * mode.
struct PlaneWaveStack {
    std::vector<std::array<int, 3>> modes;
    double amplitude = 1.0;
};

struct FromSnapshot {
    std::filesystem::path path;
};

struct InitialRecipe {
    std::variant<RadialGaussianStack, PlaneWaveStack, FromSnapshot> kind;
    std::vector<double> weights;
    bool orthonormalize = true;
};

MixedState build_initial_state(const Grid3& grid, const InitialRecipe& recipe);

// Unit-L2 radial Gaussian with density width sigma centred at `center`.
Field gaussian_field(const Grid3& grid, double sigma, std::array<double, 3> center = {0.0, 0.0, 0.0},
                     bool taper = false);
Field plane_wave(const Grid3& grid, std::array<int, 3> mode);

}  // namespace sps
