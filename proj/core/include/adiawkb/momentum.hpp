#pragma once

#include <string>
#include <vector>

#include "adiawkb/band.hpp"
#include "adiawkb/potential.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// Branch points of kappa(phi) = k(E - cos phi) in the strip 0 <= Re phi < 2pi:
// phi1 in (0, pi) real (from E1), and pi + i eta_l on the vertical line for
// edges with E_l - E >= 1. The full set is the 2 pi lattice of these points
// and their conjugates.
struct BranchPoints {
    double phi1 = 0.0;
    std::vector<Complex> phi_upper; // pi + i eta_l, eta ascending, l >= 2
};

enum class MomentumBranchTag { kappa0, kappa1, kappa_star };

struct StokesLine {
    std::vector<Complex> points;
    bool finite = false; // terminated at another branch point
};

// Everything about the complex momentum at fixed spectral parameter E for
// W(phi) = cos phi. Evaluation is branch-tracked continuation from the
// branch anchors: kappa0 anchored at phi = 0 (Im kappa0(0) > 0), kappa1 at
// phi = pi (0 < kappa1(pi) < pi). kappa_star is the real isoenergy branch.
class MomentumContext {
  public:
    MomentumContext(PeriodicPotential V, BandStructure bs, double E);

    double energy() const { return E_; }
    const PeriodicPotential& potential() const { return V_; }
    const BandStructure& bands() const { return bs_; }

    // Eq.-window check: E - 1 <= E1 - delta, E1 + delta < E + 1 < E2 - delta,
    // E2 < E3. Message names the violated inequality.
    bool window_ok(double delta, std::string* why = nullptr) const;
    void require_window(double delta) const;

    BranchPoints branch_points(int l_max) const;
    double branch_point_distance(Complex phi) const;

    Complex cal_E(Complex phi) const { return E_ - std::cos(phi); }
    Complex delta_at(Complex phi) const;

    Complex kappa0_anchor() const;
    Complex kappa1_anchor() const;

    // Branch value continued from the anchor along the default straight
    // segment. Throws CutCrossingError if that segment crosses a branch cut
    // (use continue_kappa_along with an explicit path instead), and
    // BranchPointProximityError too close to a branch point.
    Complex kappa(MomentumBranchTag branch, Complex phi) const;

    // Stepwise continuation along an explicit polyline; returns the value at
    // every path vertex (refinement vertices are internal).
    std::vector<Complex> continue_kappa_along(MomentumBranchTag branch,
                                              const std::vector<Complex>& path) const;

    // Real isoenergy branch: in i R+ on (-phi1, phi1) + 2 pi m, in [0, pi]
    // on the band segments. phi real only.
    Complex kappa_star(double phi) const;

    // Unguarded classification evaluators used by the action quadratures
    // (integrands are regular there even arbitrarily close to the edges).
    double band1_momentum(double cal_e) const;    // k in [0, pi]
    double below_gap0_momentum_abs(double cal_e) const; // arccosh branch, >= 0
    double band1_dk_dE(double cal_e) const;       // k'(cal_e), real in band 1

    // Three Stokes lines from a branch point, traced by arc length with
    // projection back onto Im int (kappa - kappa(phi0)) = 0 every step.
    std::vector<StokesLine> stokes_lines(Complex from_point, double max_arc,
                                         double step = 1e-2) const;

  private:
    bool crosses_cut(MomentumBranchTag branch, Complex a, Complex b) const;
    Complex track_along(const std::vector<Complex>& path, Complex start) const;

    PeriodicPotential V_;
    BandStructure bs_;
    double E_;
    std::vector<double> eta_; // Im of the Re = pi branch points, ascending
    double phi1_ = -1.0;      // < 0 when E - 1 > E1 (no real branch point)
};

} // namespace adiawkb
