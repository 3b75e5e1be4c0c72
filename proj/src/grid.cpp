#include "sps/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sps {

namespace {

// FFTW planning is not thread-safe and plans are reusable for every grid with the
// same n, so engines are cached per size.
std::shared_ptr<const FftEngine> engine_for(int n) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const FftEngine>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto engine = std::make_shared<const FftEngine>(n);
    cache.emplace(n, engine);
    return engine;
}

}  // namespace

Grid3::Grid3(int n, double box_length) : n_(n), length_(box_length) {
    if (n < 8 || n % 2 != 0)
        throw std::invalid_argument("grid: n_per_axis must be even and >= 8, got " + std::to_string(n));
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw std::invalid_argument("grid: box_length must be positive");
    spacing_ = box_length / n;
    dk_ = 2.0 * std::numbers::pi / box_length;
    size_ = static_cast<std::size_t>(n) * n * n;
    freq_.resize(n);
    coord_.resize(n);
    for (int i = 0; i < n; ++i) {
        const int m = i < n / 2 ? i : i - n;
        freq_[i] = m * dk_;
        coord_[i] = (i - n / 2) * spacing_;
    }
    fft_ = engine_for(n);
}

Grid3 make_grid(int n, double box_length) { return Grid3(n, box_length); }

std::array<int, 3> Grid3::unflatten(std::size_t idx) const {
    const auto n = static_cast<std::size_t>(n_);
    return {static_cast<int>(idx / (n * n)), static_cast<int>((idx / n) % n), static_cast<int>(idx % n)};
}

double Grid3::k2(std::size_t idx) const {
    const auto [i, j, l] = unflatten(idx);
    return freq_[i] * freq_[i] + freq_[j] * freq_[j] + freq_[l] * freq_[l];
}

double Grid3::kabs(std::size_t idx) const { return std::sqrt(k2(idx)); }

FftEngine::FftEngine(int n) : n_(n), size_(static_cast<std::size_t>(n) * n * n) {
    CVec a(size_), b(size_);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    // ESTIMATE keeps plan selection (and therefore roundoff) identical across runs.
    plan_fwd_ = fftw_plan_dft_3d(n, n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_3d(n, n, n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_inv_) throw std::runtime_error("fftw: plan creation failed");
}

FftEngine::~FftEngine() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void FftEngine::forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void FftEngine::inverse(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_inv_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] *= scale;
}

}  // namespace sps
