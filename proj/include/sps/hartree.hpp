#pragma once

#include <span>
#include <variant>
#include <vector>

#include "sps/spectral.hpp"

namespace sps {

struct PeriodicKernel {};
struct TruncatedKernel {
    double radius;
};
using KernelMode = std::variant<PeriodicKernel, TruncatedKernel>;

// Default for physics runs: spherically truncated Green's function with R = L/2.
KernelMode default_kernel(const Grid3& grid);
void validate_kernel(const KernelMode& mode, const Grid3& grid);

// Symbol of the attractive potential V = -(1/|x|) * n, i.e. the solution of Laplace V = n.
Multiplier coulomb_symbol(const Grid3& grid, const KernelMode& mode);

// V = F^-1[coulomb_symbol * F[n]], returned as real samples.
RVec solve_potential(const RVec& density, const Grid3& grid, const KernelMode& mode);
RVec solve_potential(const RVec& density, const Multiplier& coulomb);

struct RadialProfile {
    std::vector<double> radii;
    std::vector<double> values;
};

// V(r) = -(1/r) * 4pi int_0^r rho s^2 ds - 4pi int_r^inf rho s ds, composite trapezoid on
// the given radii (density linearly interpolated at evaluation radii between nodes).
std::vector<double> newton_radial_potential(const RadialProfile& density, std::span<const double> eval_radii);

// Enclosed mass 4pi int_0^r rho s^2 ds at each evaluation radius (same quadrature).
std::vector<double> enclosed_mass(const RadialProfile& density, std::span<const double> eval_radii);

}  // namespace sps
