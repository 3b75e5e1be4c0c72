#include "sps/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sps {

namespace {

// Neumaier compensated sum; keeps quadrature roundoff near one ulp for large grids.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

}  // namespace

Field::Field(Grid3 grid)
    : grid_(std::make_shared<const Grid3>(std::move(grid))), values_(grid_->size(), cplx{0.0, 0.0}) {}

Field::Field(Grid3 grid, CVec values)
    : grid_(std::make_shared<const Grid3>(std::move(grid))), values_(std::move(values)) {
    if (values_.size() != grid_->size()) throw std::invalid_argument("field: value count does not match grid");
}

Field Field::from_function(const Grid3& grid, const std::function<cplx(double, double, double)>& fn) {
    Field f(grid);
    const auto& x = grid.coord_axis();
    const int n = grid.n();
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) f.values_[idx++] = fn(x[i], x[j], x[l]);
    return f;
}

bool Field::all_finite() const {
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

Field& Field::operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
}

Field& Field::operator+=(const Field& o) {
    if (grid() != o.grid()) throw std::invalid_argument("field: grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    if (grid() != o.grid()) throw std::invalid_argument("field: grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

Field operator*(cplx s, Field f) { return f *= s; }
Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }

cplx inner(const Field& a, const Field& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("inner: grid mismatch");
    CompensatedSum re, im;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const cplx v = std::conj(a[i]) * b[i];
        re.add(v.real());
        im.add(v.imag());
    }
    return cplx{re.value(), im.value()} * a.grid().cell_volume();
}

double norm2(const Field& f) {
    CompensatedSum acc;
    for (const auto& v : f.values()) acc.add(std::norm(v));
    return acc.value() * f.grid().cell_volume();
}

double lp_norm(const Field& f, double p) {
    if (std::isinf(p)) {
        double mx = 0.0;
        for (const auto& v : f.values()) mx = std::max(mx, std::abs(v));
        return mx;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

}  // namespace sps
