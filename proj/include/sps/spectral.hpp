#pragma once

#include <functional>

#include "sps/field.hpp"

namespace sps {

// Fourier-space symbol indexed like the forward transform output.
class Multiplier {
public:
    Multiplier() = default;
    Multiplier(Grid3 grid, CVec symbol);

    static Multiplier from_radial(const Grid3& grid, const std::function<cplx(double)>& fn_of_kabs);
    static Multiplier from_k(const Grid3& grid,
                             const std::function<cplx(double, double, double)>& fn_of_k);

    const Grid3& grid() const { return *grid_; }
    const CVec& symbol() const { return symbol_; }
    const cplx& operator[](std::size_t i) const { return symbol_[i]; }
    std::size_t size() const { return symbol_.size(); }

    // Pointwise product of symbols.
    Multiplier operator*(const Multiplier& o) const;
    bool is_real(double tol = 0.0) const;

private:
    std::shared_ptr<const Grid3> grid_;
    CVec symbol_;
};

Field forward_transform(const Field& f);
Field inverse_transform(const Field& coeffs);

Multiplier kinetic_symbol(const Grid3& grid, double mass);
Multiplier frac_laplacian_symbol(const Grid3& grid, double s);
Multiplier identity_symbol(const Grid3& grid);

// F^-1[symbol * F[f]]
Field apply_multiplier(const Field& f, const Multiplier& m);
// Same, in place on f's storage.
void apply_multiplier_inplace(Field& f, const Multiplier& m);

// <f, m f> evaluated in Fourier space from already-transformed coefficients:
// spacing^3 / n^3 * sum conj(c) * symbol * c.
double fourier_expectation(const Field& coeffs, const Multiplier& m);

}  // namespace sps
