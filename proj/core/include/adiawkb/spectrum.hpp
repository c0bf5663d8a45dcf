#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adiawkb/actions.hpp"
#include "adiawkb/band.hpp"
#include "adiawkb/cocycle.hpp"
#include "adiawkb/potential.hpp"

namespace adiawkb {

// Energy window of the adiabatic regime (first band of the slow isoenergy
// curve): J_delta from the band structure and delta.
struct EnergyWindow {
    double lo = 0.0;
    double hi = 0.0;
    double delta = 0.0;
    bool empty() const { return !(lo < hi); }
};

EnergyWindow energy_window(const BandStructure& bs, double delta);

// Quantization roots phi1(E) = pi/2 + pi l inside the window, by monotone
// bracketing plus safeguarded Newton with the phi1' quadrature; refined to
// 1e-12 in E.
std::vector<std::pair<int, double>> find_quantization_energies(
    const PeriodicPotential& V, const BandStructure& bs, double epsilon,
    double delta);

struct PredictionEntry {
    int l = 0;
    double center = 0.0;
    double lo = 0.0, hi = 0.0;
    double width = 0.0;       // 2 (t + t1) / |phi1'|
    double lambda_l = 0.0;    // t1/t
    double F_l = 0.0;         // cos(phi1) / t  (~0 at an exact root)
    double t = 0.0, t1 = 0.0, phi1_prime = 0.0;
};

struct SpectralPrediction {
    std::vector<PredictionEntry> entries;
    double window_lo = 0.0, window_hi = 0.0;
    double epsilon = 0.0;
    std::string to_json() const;
};

SpectralPrediction predicted_intervals(
    const std::vector<std::pair<int, double>>& roots,
    const std::vector<ActionSet>& actions, const EnergyWindow& window);

// Rational approximant 2 pi / eps = N + p/q; the combined potential
// V(x - phase) + cos(eps x) has exact period L = N q + p.
struct Approximant {
    int N = 0;
    int p = 0;
    int q = 1;

    double epsilon() const { return 2.0 * pi / (N + static_cast<double>(p) / q); }
    int period() const { return N * q + p; }
};

struct OracleSpectrum {
    std::vector<std::pair<double, double>> bands; // disjoint, ascending
    Approximant approximant;
    std::vector<double> phases;
    double total_measure() const;
    std::string to_json() const;
};

// Direct-numerics reference: bands = {E : |Delta_L(E)| <= 2} of the period-L
// operator, union over the sampled phases.
OracleSpectrum oracle_spectrum(const PeriodicPotential& V, const Approximant& ap,
                               const std::vector<double>& phases,
                               const std::vector<double>& e_grid);

std::vector<double> uniform_grid(double lo, double hi, int n);
std::vector<double> default_phases(int count, int q);

// Certificate scan over an energy grid: assemble the leading-order model at
// each E and run the gap certificate.
struct GapScanEntry {
    double E = 0.0;
    GapCertificate cert;
};
std::vector<GapScanEntry> gap_scan(const PeriodicPotential& V,
                                   const BandStructure& bs, double epsilon,
                                   double delta, const std::vector<double>& e_grid,
                                   int cert_grid = 4096);

struct ComparisonReport {
    bool inconclusive = false;
    double total_band_measure = 0.0;
    double contained_measure = 0.0;
    double containment_fraction = 0.0;
    double margin = 0.0;
    double spacing_min = 0.0, spacing_max = 0.0, spacing_ratio = 0.0;
    double c1 = 0.0, c2 = 0.0; // spacing bounds over epsilon
    std::vector<double> center_offsets_eps;
    std::string to_json() const;
};

ComparisonReport compare(const SpectralPrediction& prediction,
                         const OracleSpectrum& oracle, double margin);

} // namespace adiawkb
