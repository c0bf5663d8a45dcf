#pragma once

#include <optional>
#include <vector>

#include "adiawkb/potential.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// One root of Delta(E) = +-2. Edges come in the interlacing order
// E1 < E2 <= E3 < E4 <= E5 < ...; a closed gap shows up as a coincident pair.
struct BandEdge {
    double energy = 0.0;
    bool is_lower = false;  // lower end of a spectral zone
    bool degenerate = false; // double root: the adjacent gap is closed
};

struct BandLocation {
    // band n >= 1 means E in [E_{2n-1}, E_{2n}]; gap n >= 0 means E in the
    // n-th gap (gap 0 = below E1).
    bool in_band = false;
    int index = 0;
};

class BandStructure {
  public:
    BandStructure() = default;
    explicit BandStructure(std::vector<BandEdge> edges) : edges_(std::move(edges)) {}

    const std::vector<BandEdge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    double edge(int l) const { return edges_.at(l - 1).energy; } // 1-based E_l
    double e_max_covered() const { return covered_; }
    void set_covered(double e) { covered_ = e; }

    int band_count() const { return static_cast<int>(edges_.size()) / 2; }
    double band_lower(int n) const { return edge(2 * n - 1); }
    double band_upper(int n) const { return edge(2 * n); }
    bool gap_open(int n, double tol = 1e-10) const;
    double gap_lower(int n) const { return edge(2 * n); }
    double gap_upper(int n) const { return edge(2 * n + 1); }

    // Classify a real energy; nullopt if above the covered range.
    std::optional<BandLocation> locate(double E) const;

    // Distance to the closest computed edge.
    double distance_to_edge(double E) const;
    double distance_to_edge(Complex E) const;

  private:
    std::vector<BandEdge> edges_;
    double covered_ = 0.0;
};

// All roots of Delta(E) = +-2 up to e_max: coarse scan (2000 intervals by
// default), bisection to 1e-12, one Newton polish with Delta'. Closed-gap
// double roots are detected as near-tangencies and reported as coincident
// pairs. Throws ResolutionError when the sign-pattern audit suspects a
// missed root.
BandStructure band_edges(const PeriodicPotential& V, double e_max,
                         int scan_intervals = 2000);

} // namespace adiawkb
