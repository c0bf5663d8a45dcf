#pragma once

#include <array>
#include <optional>

#include "adiawkb/band.hpp"
#include "adiawkb/potential.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// Floquet eigен-pair of the period map: psi±(x+1) = e^{±ik} psi±(x),
// normalized psi±(anchor) = 1. The periodic components p±(x) = e^{∓ikx} psi±(x)
// carry the same normalization. Values at arbitrary x come from integrating
// the equation across the reduced fractional offset.
struct BlochValues {
    Complex psi_plus, dpsi_plus;
    Complex psi_minus, dpsi_minus;
};

class BlochPair {
  public:
    BlochPair(PeriodicPotential V, Complex E, Complex k, Complex m_plus,
              Complex m_minus, double anchor, int nsteps);

    Complex k() const { return k_; }
    Complex multiplier_plus() const { return mult_p_; }
    Complex multiplier_minus() const { return mult_m_; }
    Complex m_plus() const { return m_p_; }   // psi+'(anchor)
    Complex m_minus() const { return m_m_; }  // psi-'(anchor)
    Complex wronskian() const { return m_p_ - m_m_; }
    double anchor() const { return anchor_; }
    Complex energy() const { return E_; }

    BlochValues eval(double x) const;
    Complex p_plus(double x) const;
    Complex p_minus(double x) const;

  private:
    PeriodicPotential V_;
    Complex E_, k_, m_p_, m_m_, mult_p_, mult_m_;
    double anchor_;
    int nsteps_;
};

// Builds the pair at energy E; the branch of k is the from-above branch of
// quasi_momentum (continuation for complex E). Throws DegenerateFloquetError
// at band edges. The normalization point moves from 0 to 0.37 when psi(0)
// would be ill-conditioned (psi± nearly Dirichlet at 0); a caller doing
// finite differences across nearby energies can pin the anchor instead.
BlochPair bloch_solutions(const PeriodicPotential& V, const BandStructure& bs,
                          Complex E, std::optional<double> forced_anchor = {});

// Residual of the period-integral identity
//   int_{x-1}^{x} psi+ psi- du = -i k'(E) w(psi+, psi-),
// normalized by |k' w|. Expected <= 1e-6 off band edges; exercises the Bloch
// pair, dk_dE and the quadrature in one shot.
double period_integral_residual(const PeriodicPotential& V, const BandStructure& bs,
                        Complex E, double x);

} // namespace adiawkb
