#include "sps/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace sps {

Multiplier::Multiplier(Grid3 grid, CVec symbol)
    : grid_(std::make_shared<const Grid3>(std::move(grid))), symbol_(std::move(symbol)) {
    if (symbol_.size() != grid_->size()) throw std::invalid_argument("multiplier: symbol size mismatch");
    for (const auto& s : symbol_)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw std::invalid_argument("multiplier: symbol must be finite at every frequency");
}

Multiplier Multiplier::from_k(const Grid3& grid, const std::function<cplx(double, double, double)>& fn) {
    const auto& k = grid.freq_axis();
    const int n = grid.n();
    CVec sym(grid.size());
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) sym[idx++] = fn(k[i], k[j], k[l]);
    return Multiplier(grid, std::move(sym));
}

Multiplier Multiplier::from_radial(const Grid3& grid, const std::function<cplx(double)>& fn) {
    return from_k(grid, [&](double a, double b, double c) { return fn(std::sqrt(a * a + b * b + c * c)); });
}

Multiplier Multiplier::operator*(const Multiplier& o) const {
    if (grid() != o.grid()) throw std::invalid_argument("multiplier: grid mismatch");
    CVec out(symbol_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = symbol_[i] * o.symbol_[i];
    return Multiplier(grid(), std::move(out));
}

bool Multiplier::is_real(double tol) const {
    for (const auto& s : symbol_)
        if (std::abs(s.imag()) > tol) return false;
    return true;
}

Field forward_transform(const Field& f) {
    Field out(f.grid());
    f.grid().fft().forward(f.data(), out.data());
    return out;
}

Field inverse_transform(const Field& coeffs) {
    Field out(coeffs.grid());
    coeffs.grid().fft().inverse(coeffs.data(), out.data());
    return out;
}

Multiplier kinetic_symbol(const Grid3& grid, double mass) {
    if (!(mass >= 0.0)) throw std::invalid_argument("kinetic_symbol: m must be >= 0");
    const double m2 = mass * mass;
    return Multiplier::from_k(grid, [m2](double a, double b, double c) {
        return cplx{std::sqrt(a * a + b * b + c * c + m2), 0.0};
    });
}

Multiplier frac_laplacian_symbol(const Grid3& grid, double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("frac_laplacian_symbol: s must be >= 0");
    return Multiplier::from_k(grid, [s](double a, double b, double c) {
        const double k2 = a * a + b * b + c * c;
        if (s == 0.0) return cplx{1.0, 0.0};  // 0^0 := 1
        if (k2 == 0.0) return cplx{0.0, 0.0};
        return cplx{std::pow(k2, s), 0.0};
    });
}

Multiplier identity_symbol(const Grid3& grid) {
    return Multiplier(grid, CVec(grid.size(), cplx{1.0, 0.0}));
}

void apply_multiplier_inplace(Field& f, const Multiplier& m) {
    if (f.grid() != m.grid()) throw std::invalid_argument("apply_multiplier: grid mismatch");
    const auto& fft = f.grid().fft();
    CVec work(f.size());
    fft.forward(f.data(), work.data());
    const auto& sym = m.symbol();
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= sym[i];
    fft.inverse(work.data(), f.data());
}

Field apply_multiplier(const Field& f, const Multiplier& m) {
    Field out = f;
    apply_multiplier_inplace(out, m);
    return out;
}

double fourier_expectation(const Field& coeffs, const Multiplier& m) {
    if (coeffs.grid() != m.grid()) throw std::invalid_argument("fourier_expectation: grid mismatch");
    const auto& sym = m.symbol();
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc += (sym[i] * std::norm(coeffs[i])).real();
    const auto& g = coeffs.grid();
    return acc * g.cell_volume() / static_cast<double>(g.size());
}

}  // namespace sps
