#pragma once

#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "sps/spectral.hpp"

namespace sps {

constexpr double kInf = std::numeric_limits<double>::infinity();

// S_alpha(t) f = F^-1[exp(-t |k|^{2 alpha}) F f]
Field heat_semigroup_apply(const Field& f, double t, double alpha);
Multiplier heat_symbol(const Grid3& grid, double t, double alpha);

// Test data whose spectrum is homogeneous: |f^(k)| = |k|^{-3(1 - 1/r)} (k != 0), i.e. the
// band-limited version of |x|^{-3/r}. r = 1 gives the unit-mass point source.
Field scale_invariant_profile(const Grid3& grid, double r);
// Unit-mass Gaussian density exp(-|x|^2 / (2 sigma^2)) / (2 pi sigma^2)^{3/2} (real field).
Field unit_mass_gaussian(const Grid3& grid, double sigma);

enum class ProbeData { ScaleInvariant, PeakedGaussian };

struct DecayProbe {
    double alpha = 1.0;
    double nu = 0.0;
    double r = 1.0;
    double p = kInf;
    std::vector<double> t_samples;
    ProbeData data = ProbeData::ScaleInvariant;
    double gaussian_sigma_cells = 4.0;
    // Usable-window rules: spectral tail of the evolved data beyond the Nyquist sphere
    // below `tail_tol`, and t |k_min|^{2 alpha} <= `box_limit`.
    double tail_tol = 1e-6;
    double box_limit = 3.0;
};

struct DecaySample {
    double t;
    double norm;  // 0 when the sample falls outside the usable window
    double tail;  // share of evolved spectral energy beyond the Nyquist sphere
    bool usable;
};

struct DecayFit {
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;
    double relative_gap = 0.0;  // |fitted - predicted| / |predicted|, or absolute when predicted == 0
    std::vector<DecaySample> samples;
    std::size_t used = 0;
};

double predicted_decay_slope(double alpha, double nu, double r, double p);

// Box limit on t |k_min|^{2 alpha} for scale-invariant data. The periodic images of data with a
// heavy infrared spectrum |k|^e, e = nu - 3(1 - 1/r), bend the power law early, so the admissible
// spatial scale t^{1/(2 alpha)} |k_min| shrinks from 0.7 (e >= 0) to 0.3 (e >= -1) to 0.15.
double infrared_box_limit(double alpha, double nu, double r);

struct LabeledDecayProbe {
    std::string label;
    DecayProbe probe;
};

// {alpha = 1/2, 3/4, 1} x {nu = 0, 1} x {(r,p) = (1,inf), (2,2), (2,6)}. The (2,2), nu = 0
// case uses the peaked Gaussian at t << sigma^{2 alpha}; all others use scale-invariant data.
std::vector<LabeledDecayProbe> standard_decay_matrix(const Grid3& grid, int samples = 48);
std::vector<double> geometric_times(double t_min, double t_max, int count);

// Fit of log ||(-Lap)^{nu/2} S_alpha(t) f||_{L^p} against log t over the usable window.
// Throws std::runtime_error if fewer than 5 samples are usable.
DecayFit decay_exponent_fit(const Grid3& grid, const DecayProbe& probe);

struct TripletCheck {
    bool admissible = false;
    bool scaling_ok = false;
    bool range_ok = false;
    std::string failure;  // "", "scaling", "range", or "scaling,range"
    double q_expected_inverse = 0.0;
};

// 1/q = (3 / 2alpha)(1/r - 1/p) and 1 < r <= p < 3r/(3 - 2alpha) (or p < inf when 3 <= 2alpha).
TripletCheck admissible_triplet_check(double q, double p, double r, double alpha, double tol = 1e-9);

// Forcing f(s, x) = g(s) f0(x) with f0 homogeneous of degree -3(b+1)/p (spectral power
// -3 + 3(b+1)/p), and g(s) = 1 + time_variation * sin(s).
struct DuhamelProbe {
    double alpha = 1.0;
    double nu = 0.0;
    double b = 0.8;
    double r = 2.0;
    double p = 2.0;
    std::vector<double> T_samples;
    double time_variation = 0.0;
    int panels = 64;  // initial time panels per T; doubled until converged
    // Off only for limit probes (e.g. b -> 0) that sit outside the hypothesis region on purpose.
    bool enforce_hypotheses = true;
};

struct DuhamelSample {
    double T;
    double sup_norm;  // sup_{t <= T} ||int_0^t (-Lap)^{nu/2} S(t-s) f(s) ds||_{L^r}
    int panels_used;
};

struct DuhamelFit {
    double fitted_exponent = 0.0;
    double predicted_exponent = 0.0;
    double relative_gap = 0.0;
    std::vector<DuhamelSample> samples;
};

struct LabeledDuhamel {
    std::string label;
    DuhamelProbe probe;
};

double predicted_duhamel_exponent(double alpha, double nu, double b, double r);

// Two time-independent forcings inside the hypothesis region, sampled at T |k_min|^{2 alpha}
// in [0.01, 0.2]: (alpha, nu, b) = (1, 0.2, 0.7) and (3/4, 0, 0.55).
std::vector<LabeledDuhamel> standard_duhamel_probes(const Grid3& grid, int samples = 9);
// Throws std::invalid_argument when the probe violates the hypotheses
// (admissible (q,p,r), p > b+1, p < r(b+1), r >= 3b/(2alpha) > 1, predicted exponent > 0),
// std::runtime_error when the time quadrature does not converge to 1%.
DuhamelFit duhamel_scaling_probe(const Grid3& grid, const DuhamelProbe& probe);

// sup_x (|x|^{-gamma} * |u|^2)(x) / ||u||^2_{H-dot^{gamma/2}}; 0 for u = 0.
// The kernel is truncated at radius L/2 so periodic images do not contribute.
double hardy_probe(const Field& u, double gamma);

nlohmann::json to_json(const DecayFit& fit, double tolerance);
nlohmann::json to_json(const DuhamelFit& fit, double tolerance);

}  // namespace sps
