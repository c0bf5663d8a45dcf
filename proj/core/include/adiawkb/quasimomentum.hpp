#pragma once

#include "adiawkb/band.hpp"
#include "adiawkb/potential.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// |E - E_l| below this triggers BranchPointProximityError: square-root
// branches are garbage that close to an edge.
inline constexpr double edge_tolerance = 1e-8;

// Boundary value k_0(E + i0) at real E: real and increasing across band n
// from (n-1) pi to n pi, and n pi + i arccosh(|Delta|/2) inside gap n
// (gap 0 = below the spectrum, where i k_0 < 0).
Complex quasi_momentum_real(const PeriodicPotential& V, const BandStructure& bs,
                            double E);

// Branch k_l on the plane cut along (-inf, E_{2l}] and [E_{2l+1}, +inf);
// l = 0 gives k_0 on the plane cut along [E_1, +inf). Values at real E on a
// cut mean the limit from above. Continuation-based for complex E.
Complex quasi_momentum(const BandStructure& bs, const PeriodicPotential& V,
                       Complex E, int l);

// k'(E) = -Delta'(E) / (2 sin k(E)), branch consistent with quasi_momentum.
Complex dk_dE(const BandStructure& bs, const PeriodicPotential& V, Complex E,
              int l);

} // namespace adiawkb
