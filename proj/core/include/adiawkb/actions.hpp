#pragma once

#include <string>
#include <utility>

#include "adiawkb/momentum.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// Which quadrature backend evaluates the smooth parts of the action
// integrals. The two routes share only the endpoint substitution, so their
// agreement is a genuine cross-check.
enum class QuadRoute { adaptive, fixed_gl };

// Action integrals at fixed (E, epsilon): the phase phi1, the tunneling
// coefficients t, t1 (exponentially small in 1/epsilon; exponents kept
// separately), the correction phi2 and the prefactor integrals
// int_0^{phi1} omega±. Every exported quantity carries the gauge anchor the
// p± normalization used.
struct ActionSet {
    double E = 0.0;
    double epsilon = 0.0;

    double phi1 = 0.0;       // (2/eps) int_{phi1}^{pi} kappa
    double phi1_prime = 0.0; // d phi1 / dE
    double ln_t = 0.0;       // < 0
    double ln_t1 = 0.0;      // < 0; meaningful only when has_t1
    double t = 0.0;
    double t1 = 0.0;
    bool has_t1 = false;

    bool has_prefactors = false;
    double phi2 = 0.0;
    double phi2_imag_residual = 0.0; // |Im phi2| diagnostic, expect <= 1e-6
    Complex omega_int_plus{};
    Complex omega_int_minus{};
    double gauge_anchor = 0.37;

    std::string to_json() const;
};

// Canonical Bloch prefactor data: g±(cal_E) by gauge-aligned finite
// differences of the periodic components, and omega±(phi) = sin(phi) g±.
std::pair<Complex, Complex> g_pm(const MomentumContext& ctx, Complex cal_e,
                                 double fd_step = -1.0);
std::pair<Complex, Complex> omega_pm(const MomentumContext& ctx, Complex varphi);

// Residual of the gauge identity omega+ + omega- = -d/dphi ln(k'_E w0) at a
// point, in the fixed p±(x0) = 1 gauge. Expect <= 1e-5 off the edges.
double gauge_identity_residual(const MomentumContext& ctx, Complex varphi);

double phase_phi1(const MomentumContext& ctx, double epsilon,
                  QuadRoute route = QuadRoute::adaptive);
// phi1 and its E-derivative from the k' quadrature, one pass each.
std::pair<double, double> phase_phi1_with_derivative(
    const MomentumContext& ctx, double epsilon,
    QuadRoute route = QuadRoute::adaptive);

// t = exp(-(2/eps) int_0^{phi1} |kappa|); returns ln t.
double tunneling_t_exponent(const MomentumContext& ctx, double epsilon,
                            QuadRoute route = QuadRoute::adaptive);
// t1 = exp(-(2/eps) int_0^{eta2} (pi - kappa(pi + i eta)) d eta); returns
// ln t1. Throws ClosedGapError when the first gap is closed.
double tunneling_t1_exponent(const MomentumContext& ctx, double epsilon,
                             QuadRoute route = QuadRoute::adaptive);

struct Phi2Result {
    double value = 0.0;
    double imag_residual = 0.0;
};
// phi2 = (i eps / 2 pi) int_{phi1}^{phi2} (omega- - omega+) along the real
// segment to pi and the vertical segment up to the branch point. Real up to
// quadrature noise; |Im| > 1e-4 raises GaugeError. reflect = true runs the
// conjugate path (test hook).
Phi2Result phi2_correction(const MomentumContext& ctx, double epsilon,
                           bool reflect = false);

struct PrefactorIntegrals {
    Complex omega_int_plus{};
    Complex omega_int_minus{};
    Mat2 T; // diag(exp(+int omega+), exp(-int omega-))
};
PrefactorIntegrals prefactor_T(const MomentumContext& ctx);

// window_delta: the Eq.-window margin this pipeline runs at.
// with_prefactors = false skips the omega integrals (certificate scans need
// only phi1, t, t1).
ActionSet compute_actions(const MomentumContext& ctx, double epsilon,
                          double window_delta, bool with_prefactors = true,
                          QuadRoute route = QuadRoute::adaptive);

} // namespace adiawkb
