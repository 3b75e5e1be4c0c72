#include "sps/mixed_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "sps/spectral.hpp"

namespace sps {

double GramMatrix::max_deviation(const GramMatrix& other) const {
    if (rank != other.rank) throw std::invalid_argument("gram: rank mismatch");
    double mx = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) mx = std::max(mx, std::abs(entries[i] - other.entries[i]));
    return mx;
}

double GramMatrix::max_deviation_from_identity() const {
    double mx = 0.0;
    for (std::size_t j = 0; j < rank; ++j)
        for (std::size_t k = 0; k < rank; ++k)
            mx = std::max(mx, std::abs((*this)(j, k) - (j == k ? 1.0 : 0.0)));
    return mx;
}

MixedState::MixedState(std::vector<Field> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
    if (components_.empty()) throw std::invalid_argument("mixed_state: rank must be >= 1");
    if (components_.size() != weights_.size())
        throw std::invalid_argument("mixed_state: one weight per component required");
    for (double w : weights_)
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("mixed_state: weights must be positive");
    for (const auto& c : components_)
        if (c.grid() != components_.front().grid()) throw std::invalid_argument("mixed_state: grid mismatch");
}

double MixedState::trace() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

bool MixedState::all_finite() const {
    return std::all_of(components_.begin(), components_.end(), [](const Field& f) { return f.all_finite(); });
}

RVec density(const MixedState& state) {
    RVec n(state.grid().size(), 0.0);
    for (std::size_t k = 0; k < state.rank(); ++k) {
        const double w = state.weights()[k];
        const auto& psi = state[k].values();
        for (std::size_t i = 0; i < n.size(); ++i) n[i] += w * std::norm(psi[i]);
    }
    return n;
}

double integrate(const Grid3& grid, const RVec& values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc * grid.cell_volume();
}

cplx weighted_inner(const MixedState& a, const MixedState& b) {
    if (a.rank() != b.rank()) throw std::invalid_argument("weighted_inner: rank mismatch");
    if (a.weights() != b.weights()) throw std::invalid_argument("weighted_inner: weight mismatch");
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < a.rank(); ++k) acc += a.weights()[k] * inner(a[k], b[k]);
    return acc;
}

double weighted_mass(const MixedState& state) {
    double acc = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k) acc += state.weights()[k] * norm2(state[k]);
    return acc;
}

std::vector<double> component_masses(const MixedState& state) {
    std::vector<double> out;
    out.reserve(state.rank());
    for (const auto& c : state.components()) out.push_back(norm2(c));
    return out;
}

double sobolev_norm(const MixedState& state, double s, bool homogeneous) {
    if (!(s >= 0.0)) throw std::invalid_argument("sobolev_norm: s must be >= 0");
    const Multiplier sym = homogeneous ? frac_laplacian_symbol(state.grid(), s)
                                       : Multiplier::from_radial(state.grid(), [s](double k) {
                                             return cplx{std::pow(1.0 + k * k, s), 0.0};
                                         });
    double acc = 0.0;
    for (std::size_t k = 0; k < state.rank(); ++k)
        acc += state.weights()[k] * fourier_expectation(forward_transform(state[k]), sym);
    return std::sqrt(std::max(acc, 0.0));
}

GramMatrix gram_matrix(const MixedState& state) {
    GramMatrix g;
    g.rank = state.rank();
    g.entries.resize(g.rank * g.rank);
    for (std::size_t j = 0; j < g.rank; ++j)
        for (std::size_t k = 0; k < g.rank; ++k) g.entries[j * g.rank + k] = inner(state[j], state[k]);
    return g;
}

void orthonormalize(std::vector<Field>& components, double dependence_tol) {
    for (std::size_t k = 0; k < components.size(); ++k) {
        auto& v = components[k];
        const double initial = std::sqrt(norm2(v));
        if (!(initial > 0.0)) throw std::invalid_argument("orthonormalize: zero component");
        for (std::size_t j = 0; j < k; ++j) {
            const cplx proj = inner(components[j], v);
            const auto& u = components[j].values();
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
        }
        const double nrm = std::sqrt(norm2(v));
        if (nrm <= dependence_tol * initial) throw std::invalid_argument("orthonormalize: linearly dependent components");
        v *= 1.0 / nrm;
    }
}

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("snapshot: truncated file");
    return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const MixedState& state) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path.string());
    os.write("SPS1", 4);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(state.grid().n()));
    put<double>(os, state.grid().box_length());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(state.rank()));
    for (double w : state.weights()) put<double>(os, w);
    for (const auto& c : state.components())
        os.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(cplx)));
    if (!os) throw std::runtime_error("snapshot: write failed for " + path.string());
}

MixedState read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SPS1", 4) != 0) throw std::runtime_error("snapshot: bad magic");
    const auto n = get<std::uint32_t>(is);
    const auto length = get<double>(is);
    const auto rank = get<std::uint32_t>(is);
    if (rank == 0) throw std::runtime_error("snapshot: rank 0");
    Grid3 grid(static_cast<int>(n), length);
    std::vector<double> weights(rank);
    for (auto& w : weights) w = get<double>(is);
    std::vector<Field> comps;
    comps.reserve(rank);
    for (std::uint32_t k = 0; k < rank; ++k) {
        Field f(grid);
        is.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
        if (!is) throw std::runtime_error("snapshot: truncated component data");
        comps.push_back(std::move(f));
    }
    return MixedState(std::move(comps), std::move(weights));
}

}  // namespace sps
