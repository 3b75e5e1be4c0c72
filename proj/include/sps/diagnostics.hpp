#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

#include "sps/hartree.hpp"
#include "sps/mixed_state.hpp"

namespace sps {

struct DiagnosticsRecord {
    double t = 0.0;
    std::vector<double> masses;
    double total_mass = 0.0;
    double energy = 0.0;
    double kinetic_part = 0.0;
    double potential_part = 0.0;
    double h_half = 0.0;
    double h_half_hom = 0.0;
    double ledger = 0.0;
    double variance_m = 0.0;
    double dilation_a = 0.0;
    double rest_term = 0.0;
    double moment1 = 0.0;
    double moment2 = 0.0;
    double tail_fraction = 0.0;
};

// CSV header for rank K: t, mass_1..mass_K, total_mass, ..., tail_fraction.
std::string csv_header(std::size_t rank);
std::string to_csv_row(const DiagnosticsRecord& r);
nlohmann::json to_json(const DiagnosticsRecord& r);

struct EnergyParts {
    double total = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
};

// Cosine taper applied to position operators inside moment / M / A quadratures: each
// coordinate factor is 1 for |x_j| <= (1 - shell) L/2 and rolls off to 0 at the box face.
struct WindowConfig {
    double shell_fraction = 0.1;
};

// Precomputes every symbol and coordinate array a record needs. Immutable.
class DiagnosticsEngine {
public:
    DiagnosticsEngine(const Grid3& grid, double mass, KernelMode kernel, double alpha = 0.5,
                      WindowConfig window = {});

    DiagnosticsRecord sample(const MixedState& state, double t, double ledger) const;

    EnergyParts energy(const MixedState& state) const;
    double variance_m(const MixedState& state) const;
    double dilation_a(const MixedState& state) const;
    double rest_term(const MixedState& state) const;
    double moment(const MixedState& state, int j) const;
    double tail_fraction(const MixedState& state) const;
    // 2 eps sum lambda <psi, (-Lap)^alpha psi>
    double dissipation_rate(const MixedState& state, double epsilon) const;
    // Weighted mass fraction where the window is below 1 (periodic-wrap guard).
    double boundary_fraction(const MixedState& state) const;

    const Grid3& grid() const { return grid_; }
    // Tail shells: |k| >= tail_cut() = (2/3) * Nyquist.
    double tail_cut() const { return tail_cut_; }

private:
    struct MomentsMA {
        double m = 0.0;
        double a = 0.0;
    };
    MomentsMA variance_and_dilation(const MixedState& state) const;

    Grid3 grid_;
    double mass_;
    KernelMode kernel_;
    double alpha_;
    double tail_cut_;
    Multiplier coulomb_;
    RVec omega_;      // sqrt(|k|^2+m^2)
    RVec kabs_;       // |k|
    RVec bessel_;     // sqrt(1+|k|^2)
    RVec rest_;       // m^2 / sqrt(|k|^2+m^2)
    RVec diss_;       // |k|^{2 alpha}
    std::array<RVec, 3> kaxis_;   // k_j with the Nyquist entry zeroed (derivative symbol)
    std::array<RVec, 3> xwin_;    // windowed coordinates x_j W(x)
    RVec r2win_;                  // |x|^2 W(x)^2
    RVec window_;
};

// Convenience wrappers matching the operation list.
EnergyParts energy(const MixedState& state, double mass, const KernelMode& kernel);
double variance_m(const MixedState& state, double mass);
double dilation_a(const MixedState& state);
double rest_term(const MixedState& state, double mass);
double moments(const MixedState& state, int j);

double dissipation_ledger_update(double ledger, double rate_before, double rate_after, double dt);

struct MonitorThresholds {
    double blowup_ratio = 50.0;
    double tail_threshold = 0.10;
};

struct MonitorVerdict {
    bool blowup = false;
    std::string reason;
};

MonitorVerdict blowup_monitor(const DiagnosticsRecord& record, double h_half_initial,
                              const MonitorThresholds& thresholds);

}  // namespace sps
