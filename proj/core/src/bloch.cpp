#include "adiawkb/bloch.hpp"

#include <cmath>

#include "adiawkb/errors.hpp"
#include "adiawkb/quadrature.hpp"
#include "adiawkb/quasimomentum.hpp"
#include "adiawkb/transfer.hpp"

namespace adiawkb {

BlochPair::BlochPair(PeriodicPotential V, Complex E, Complex k, Complex m_plus,
                     Complex m_minus, double anchor, int nsteps)
    : V_(std::move(V)), E_(E), k_(k), m_p_(m_plus), m_m_(m_minus),
      mult_p_(std::exp(Complex(0, 1) * k)), mult_m_(std::exp(-Complex(0, 1) * k)),
      anchor_(anchor), nsteps_(nsteps) {}

BlochValues BlochPair::eval(double x) const {
    // reduce to [anchor, anchor+1)
    const double off = x - anchor_;
    const double n = std::floor(off);
    const double frac = off - n;
    Mat2 P = Mat2::identity();
    if (frac > 1e-14) {
        auto q = [&](double u) { return V_.eval(u); };
        const int steps = std::max(8, static_cast<int>(std::ceil(frac * nsteps_)));
        P = to_mat2(propagate<Complex>(q, E_, anchor_, anchor_ + frac, steps));
    }
    const Complex fp = std::pow(mult_p_, n);
    const Complex fm = std::pow(mult_m_, n);
    const auto vp = P.apply({1.0, m_p_});
    const auto vm = P.apply({1.0, m_m_});
    return {fp * vp[0], fp * vp[1], fm * vm[0], fm * vm[1]};
}

Complex BlochPair::p_plus(double x) const {
    return std::exp(-Complex(0, 1) * k_ * x) * eval(x).psi_plus;
}

Complex BlochPair::p_minus(double x) const {
    return std::exp(Complex(0, 1) * k_ * x) * eval(x).psi_minus;
}

BlochPair bloch_solutions(const PeriodicPotential& V, const BandStructure& bs,
                          Complex E, std::optional<double> forced_anchor) {
    if (bs.distance_to_edge(E) < edge_tolerance)
        throw DegenerateFloquetError(
            "bloch_solutions: Floquet eigenvectors degenerate at a band edge");
    const Complex k = quasi_momentum(bs, V, E, 0);
    const Complex lam_p = std::exp(Complex(0, 1) * k);
    const Complex lam_m = std::exp(-Complex(0, 1) * k);
    if (std::abs(lam_p - lam_m) < 1e-7)
        throw DegenerateFloquetError(
            "Floquet eigenvectors degenerate: E at a band edge");

    const double scale = std::abs(E) + std::abs(V.mean()) + V.oscillation_bound();
    const int nsteps = transfer_steps(scale);

    double anchor = forced_anchor.value_or(0.0);
    Mat2 M = transfer_over_period(V, E, nsteps, anchor).entries;
    if (!forced_anchor && std::abs(M.a12) < 1e-8 * std::max(1.0, M.max_abs())) {
        // psi(0) of the eigenvectors ill-conditioned; re-anchor off-symmetry
        anchor = 0.37;
        M = transfer_over_period(V, E, nsteps, anchor).entries;
    }
    if (std::abs(M.a12) < 1e-12 * std::max(1.0, M.max_abs()))
        throw NumericalError(
            "bloch_solutions: period map off-diagonal vanishes at the anchor");
    const Complex m_p = (lam_p - M.a11) / M.a12;
    const Complex m_m = (lam_m - M.a11) / M.a12;
    return BlochPair(V, E, k, m_p, m_m, anchor, nsteps);
}

double period_integral_residual(const PeriodicPotential& V, const BandStructure& bs,
                        Complex E, double x) {
    const BlochPair pair = bloch_solutions(V, bs, E);

    const auto loc = (std::abs(E.imag()) < 1e-14) ? bs.locate(E.real())
                                                  : std::nullopt;
    const int l = (loc && !loc->in_band) ? loc->index : 0;
    const Complex kprime = dk_dE(bs, V, E, l);
    const Complex w = pair.wronskian();

    auto integrand = [&](double u) -> Complex {
        const BlochValues v = pair.eval(u);
        return v.psi_plus * v.psi_minus;
    };
    const Complex integral = integrate_gl(integrand, x - 1.0, x, 64);
    const Complex rhs = -Complex(0, 1) * kprime * w;
    return std::abs(integral - rhs) / std::abs(rhs);
}

} // namespace adiawkb
