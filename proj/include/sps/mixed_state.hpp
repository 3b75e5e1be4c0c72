#pragma once

#include <filesystem>
#include <vector>

#include "sps/field.hpp"

namespace sps {

struct GramMatrix {
    std::size_t rank = 0;
    std::vector<cplx> entries;  // row-major

    cplx operator()(std::size_t j, std::size_t k) const { return entries[j * rank + k]; }
    // max |G - other| over entries
    double max_deviation(const GramMatrix& other) const;
    double max_deviation_from_identity() const;
};

// Finite-rank ensemble {psi_k, lambda_k}. Weights are fixed for the lifetime of the state.
class MixedState {
public:
    MixedState(std::vector<Field> components, std::vector<double> weights);

    std::size_t rank() const { return components_.size(); }
    const Grid3& grid() const { return components_.front().grid(); }

    const std::vector<Field>& components() const { return components_; }
    std::vector<Field>& components() { return components_; }
    const Field& operator[](std::size_t k) const { return components_[k]; }
    Field& operator[](std::size_t k) { return components_[k]; }

    const std::vector<double>& weights() const { return weights_; }
    double trace() const;

    bool all_finite() const;

private:
    std::vector<Field> components_;
    std::vector<double> weights_;
};

// n(x) = sum_k lambda_k |psi_k(x)|^2, accumulated in ascending k.
RVec density(const MixedState& state);
double integrate(const Grid3& grid, const RVec& values);

cplx weighted_inner(const MixedState& a, const MixedState& b);
double weighted_mass(const MixedState& state);  // sum lambda_k ||psi_k||^2
std::vector<double> component_masses(const MixedState& state);

// Inhomogeneous uses (1+|k|^2)^s, homogeneous |k|^{2s}.
double sobolev_norm(const MixedState& state, double s, bool homogeneous);

GramMatrix gram_matrix(const MixedState& state);

// Modified Gram-Schmidt in the quadrature inner product. Throws on (near) linear dependence.
void orthonormalize(std::vector<Field>& components, double dependence_tol = 1e-10);

// "SPS1" snapshot: magic, n (u32), L (f64), K (u32), K weights (f64), then K blocks of
// n^3 interleaved (re, im) f64. All little-endian.
void write_snapshot(const std::filesystem::path& path, const MixedState& state);
MixedState read_snapshot(const std::filesystem::path& path);

}  // namespace sps
