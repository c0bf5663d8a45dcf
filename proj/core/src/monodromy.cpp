#include "adiawkb/monodromy.hpp"

#include <cmath>

#include "adiawkb/cocycle.hpp"
#include "adiawkb/errors.hpp"
#include "adiawkb/transfer.hpp"

#include "json.hpp"

namespace adiawkb {

Mat2 MonodromyModel::eval_inner(double z) const {
    const Complex eiz = std::exp(Complex(0.0, z));
    const Complex emiz = 1.0 / eiz;
    return Mat2{a0, b0 + b1 * eiz, c0 + c1 * emiz, d0 + d1 * eiz + dm1 * emiz};
}

Mat2 MonodromyModel::eval(double phi) const {
    const Mat2 inner = eval_inner(2.0 * pi * phi + C);
    return T * inner * T.inverse();
}

MonodromyModel assemble_model(const ActionSet& a) {
    if (!a.has_t1)
        throw ClosedGapError("assemble_model: action set has no t1 (closed gap)");
    MonodromyModel m;
    m.epsilon = a.epsilon;
    m.E = a.E;
    m.t = a.t;
    m.t1 = a.t1;
    m.phi1 = a.phi1;
    const Complex eiphi1 = std::exp(Complex(0.0, a.phi1));
    const Complex i(0.0, 1.0);
    m.a0 = a.t * eiphi1;
    m.b0 = i * eiphi1;
    m.b1 = -i * a.t1;
    m.c0 = -i * eiphi1;
    m.c1 = i * a.t1;
    m.d0 = 2.0 / a.t * std::cos(a.phi1);
    m.d1 = -a.t1 / a.t;
    m.dm1 = -a.t1 / a.t;
    m.C = 2.0 * pi / a.epsilon * (pi + a.phi2);
    if (a.has_prefactors)
        m.T = Mat2{std::exp(a.omega_int_plus), 0.0, 0.0,
                   std::exp(-a.omega_int_minus)};
    return m;
}

Mat2 exact_monodromy(const PeriodicPotential& V, double E, double epsilon,
                     double phi, int steps_per_unit) {
    if (epsilon <= 0.0) throw ValidationError("exact_monodromy: epsilon <= 0");
    const double L = 2.0 * pi / epsilon;
    if (steps_per_unit <= 0) {
        const double scale =
            std::abs(E) + std::abs(V.mean()) + V.oscillation_bound() + 1.0;
        steps_per_unit = std::max(192, static_cast<int>(48.0 * std::sqrt(scale)));
    }
    const int nsteps = static_cast<int>(std::ceil(L * steps_per_unit));
    // Solutions of the equation at parameter phi + L, shifted by L in x,
    // solve the equation at parameter phi: the Cauchy data transported over
    // [0, L] expressed in the Cauchy basis gives the monodromy matrix.
    // Extended precision: the entries grow like the tunneling amplification,
    // and det = ad - bc must survive the cancellation at that magnitude.
    auto q = [&](double x) { return V.eval(x - phi - L) + std::cos(epsilon * x); };
    const auto y = propagate<long double>(q, static_cast<long double>(E), 0.0, L,
                                          nsteps);
    // y = (u, v, u', v') with u: (1,0) data, v: (0,1) data at x = 0
    return Mat2{static_cast<double>(y[3]), static_cast<double>(y[1]),
                static_cast<double>(y[2]), static_cast<double>(y[0])};
}

CocycleCompareReport cocycle_observables_compare(const MonodromyModel& model,
                                                 const PeriodicPotential& V,
                                                 int lyapunov_steps,
                                                 int cert_grid,
                                                 unsigned long long seed) {
    const double h = std::fmod(2.0 * pi / model.epsilon, 1.0);

    MatrixCocycle mc{[&model](double phi) { return model.eval(phi); }, h};

    // memoize the last exact matrix: with h = 0 every step reuses it
    struct Memo {
        const PeriodicPotential* V;
        double E, eps;
        double last_phi = std::numeric_limits<double>::quiet_NaN();
        Mat2 last;
        Mat2 operator()(double phi) {
            if (phi != last_phi) {
                last = exact_monodromy(*V, E, eps, phi);
                last_phi = phi;
            }
            return last;
        }
    };
    auto memo = std::make_shared<Memo>();
    memo->V = &V;
    memo->E = model.E;
    memo->eps = model.epsilon;
    MatrixCocycle ec{[memo](double phi) { return (*memo)(phi); }, h};

    CocycleCompareReport rep;
    const LyapunovEstimate ml = lyapunov(mc, 0.0, lyapunov_steps, seed);
    const LyapunovEstimate el = lyapunov(ec, 0.0, lyapunov_steps, seed);
    rep.model_lyapunov = ml.value;
    rep.model_stderr = ml.stderr_est;
    rep.exact_lyapunov = el.value;
    rep.exact_stderr = el.stderr_est;
    try {
        rep.model_gap_holds = gap_certificate(mc.M, h, cert_grid).holds;
    } catch (const NumericalError&) {
        rep.model_gap_holds = false;
    }
    try {
        rep.exact_gap_holds = gap_certificate(ec.M, h, cert_grid).holds;
    } catch (const NumericalError&) {
        rep.exact_gap_holds = false;
    }
    rep.lyapunov_difference = rep.model_lyapunov - rep.exact_lyapunov;
    return rep;
}

std::string MonodromyModel::to_json() const {
    nlohmann::json j;
    auto put = [&](const char* name, Complex c) {
        j[name] = {c.real(), c.imag()};
    };
    put("a0", a0);
    put("b0", b0);
    put("b1", b1);
    put("c0", c0);
    put("c1", c1);
    put("d0", d0);
    put("d1", d1);
    put("dm1", dm1);
    j["C"] = C;
    put("T11", T.a11);
    put("T22", T.a22);
    j["epsilon"] = epsilon;
    j["E"] = E;
    j["t"] = t;
    j["t1"] = t1;
    j["phi1"] = phi1;
    return j.dump(2);
}

std::string CocycleCompareReport::to_json() const {
    nlohmann::json j;
    j["model_lyapunov"] = model_lyapunov;
    j["model_stderr"] = model_stderr;
    j["exact_lyapunov"] = exact_lyapunov;
    j["exact_stderr"] = exact_stderr;
    j["model_gap_holds"] = model_gap_holds;
    j["exact_gap_holds"] = exact_gap_holds;
    j["lyapunov_difference"] = lyapunov_difference;
    return j.dump(2);
}

} // namespace adiawkb
