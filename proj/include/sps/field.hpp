#pragma once

#include <functional>

#include "sps/grid.hpp"

namespace sps {

// One complex wavefunction sampled on a grid (position or Fourier representation;
// the owner decides which, the container does not track it).
class Field {
public:
    Field() = default;
    explicit Field(Grid3 grid);
    Field(Grid3 grid, CVec values);

    static Field from_function(const Grid3& grid, const std::function<cplx(double, double, double)>& fn);

    const Grid3& grid() const { return *grid_; }
    std::size_t size() const { return values_.size(); }

    CVec& values() { return values_; }
    const CVec& values() const { return values_; }
    cplx* data() { return values_.data(); }
    const cplx* data() const { return values_.data(); }
    cplx& operator[](std::size_t i) { return values_[i]; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    bool all_finite() const;

    Field& operator*=(cplx s);
    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);

private:
    std::shared_ptr<const Grid3> grid_;
    CVec values_;
};

Field operator*(cplx s, Field f);
Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);

// Quadrature helpers: spacing^3-weighted Riemann sums.
cplx inner(const Field& a, const Field& b);  // conjugate-linear in a
double norm2(const Field& f);                 // squared L2 norm
double lp_norm(const Field& f, double p);     // p = inf -> max modulus

}  // namespace sps
