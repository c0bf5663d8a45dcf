#pragma once

#include <string>

#include "adiawkb/actions.hpp"
#include "adiawkb/potential.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// Leading-order asymptotic monodromy matrix
//
//   M(phi) = T [[a0, b0 + b1 e^{iz}], [c0 + c1 e^{-iz}, d0 + d1 e^{iz} + dm1 e^{-iz}]] T^{-1},
//   z = 2 pi phi + C,
//
// with the coefficient table tied to the action set:
//   a0 = t e^{i phi1},      d0 = (2/t) cos phi1,  d1 = dm1 = -t1/t,
//   b0 = i e^{i phi1},      b1 = -i t1,
//   c0 = -i e^{i phi1},     c1 = i t1,
// and C = (2 pi / eps)(pi + phi2). The inner determinant is 1 - t1^2
// identically in z.
struct MonodromyModel {
    Complex a0, b0, b1, c0, c1, d0, d1, dm1;
    double C = 0.0;
    Mat2 T = Mat2::identity();
    double epsilon = 0.0;
    double E = 0.0;
    double t = 0.0, t1 = 0.0, phi1 = 0.0;

    Mat2 eval_inner(double z) const;
    Mat2 eval(double phi) const;
    Complex inner_det(double z) const { return eval_inner(z).det(); }

    std::string to_json() const;
};

MonodromyModel assemble_model(const ActionSet& actions);

// Exact reference monodromy in the Cauchy consistent basis: integrate the
// equation at parameter phi + 2 pi/eps over one x-period 2 pi/eps of the slow
// cosine and express the transported Cauchy data in the basis at phi. Real
// entries, det = 1, 1-periodic in phi.
Mat2 exact_monodromy(const PeriodicPotential& V, double E, double epsilon,
                     double phi, int steps_per_unit = 0);

// Basis-robust comparison between the asymptotic model and the exact
// monodromy at the same (E, eps): Lyapunov exponents and gap verdicts.
// Entrywise comparison is meaningless (the two live in different consistent
// bases), so only cocycle observables are reported.
struct CocycleCompareReport {
    double model_lyapunov = 0.0, model_stderr = 0.0;
    double exact_lyapunov = 0.0, exact_stderr = 0.0;
    bool model_gap_holds = false;
    bool exact_gap_holds = false;
    double lyapunov_difference = 0.0;
    std::string to_json() const;
};

CocycleCompareReport cocycle_observables_compare(const MonodromyModel& model,
                                                 const PeriodicPotential& V,
                                                 int lyapunov_steps = 20000,
                                                 int cert_grid = 512,
                                                 unsigned long long seed = 7);

} // namespace adiawkb
