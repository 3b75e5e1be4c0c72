#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "sps/aligned.hpp"

namespace sps {

using cplx = std::complex<double>;
using CVec = std::vector<cplx, AlignedAllocator<cplx>>;
using RVec = std::vector<double, AlignedAllocator<double>>;

class FftEngine;

// Periodic cube [-L/2, L/2)^3 sampled at n points per axis.
// Flat index = (ix*n + iy)*n + iz; position x_i = (i - n/2) * spacing.
// Frequency index i maps to k = (i < n/2 ? i : i - n) * 2pi/L (FFTW order).
class Grid3 {
public:
    Grid3(int n, double box_length);

    int n() const { return n_; }
    double box_length() const { return length_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return size_; }
    double cell_volume() const { return spacing_ * spacing_ * spacing_; }
    double dk() const { return dk_; }
    // Largest axis frequency magnitude, n/2 * dk.
    double nyquist() const { return 0.5 * n_ * dk_; }

    const std::vector<double>& freq_axis() const { return freq_; }
    const std::vector<double>& coord_axis() const { return coord_; }

    double k2(std::size_t idx) const;
    double kabs(std::size_t idx) const;
    std::array<int, 3> unflatten(std::size_t idx) const;

    const FftEngine& fft() const { return *fft_; }

    bool operator==(const Grid3& o) const { return n_ == o.n_ && length_ == o.length_; }
    bool operator!=(const Grid3& o) const { return !(*this == o); }

private:
    int n_;
    double length_;
    double spacing_;
    double dk_;
    std::size_t size_;
    std::vector<double> freq_;
    std::vector<double> coord_;
    std::shared_ptr<const FftEngine> fft_;
};

Grid3 make_grid(int n, double box_length);

// Unnormalized forward / 1/n^3-normalized inverse complex 3-D DFT.
class FftEngine {
public:
    explicit FftEngine(int n);
    ~FftEngine();
    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    void forward(const cplx* in, cplx* out) const;
    void inverse(const cplx* in, cplx* out) const;

private:
    int n_;
    std::size_t size_;
    void* plan_fwd_;
    void* plan_inv_;
};

}  // namespace sps
