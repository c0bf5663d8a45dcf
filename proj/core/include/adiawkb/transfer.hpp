#pragma once

#include <array>
#include <cmath>

#include "adiawkb/errors.hpp"
#include "adiawkb/ode.hpp"
#include "adiawkb/potential.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// Period map of -psi'' + V psi = E psi: maps (psi, psi') at x0 to x0 + 1.
// Wronskian conservation makes det = 1 the built-in health check.
struct TransferMatrix {
    Mat2 entries;
    Complex energy;

    double det_defect() const { return std::abs(entries.det() - 1.0); }
};

// Step count heuristic for one unit of x: resolves the fastest oscillation
// sqrt(|E| + |V|) with generous margin for the order-8 method.
inline int transfer_steps(double energy_scale) {
    const int n = static_cast<int>(24.0 * std::sqrt(std::max(energy_scale, 1.0)));
    return std::max(256, n);
}

// Fundamental matrix of y1' = y2, y2' = (q(x) - E) y1 over [x0, x1].
// Scalar S is double (real E, hot paths) or Complex. Columns are the Cauchy
// solutions: column 1 = (1,0) data, column 2 = (0,1) data.
template <class S, class PotFn>
std::array<S, 4> propagate(const PotFn& q, S E, double x0, double x1, int nsteps) {
    using State = std::array<S, 4>;
    auto rhs = [&](double x, const State& y) -> State {
        const S w = S(q(x)) - E;
        return {y[2], y[3], w * y[0], w * y[1]};
    };
    // State layout: (u, v, u', v') with u = column-1 value, v = column-2 value.
    State y{S(1.0), S(0.0), S(0.0), S(1.0)};
    y = integrate_rkf78(rhs, x0, x1, y, nsteps);
    for (const S& c : y)
        if (!std::isfinite(std::abs(c)))
            throw IntegrationError("transfer integration diverged");
    return y;
}

template <class S, class PotFn>
std::array<S, 4> propagate_rk4(const PotFn& q, S E, double x0, double x1, int nsteps) {
    using State = std::array<S, 4>;
    auto rhs = [&](double x, const State& y) -> State {
        const S w = S(q(x)) - E;
        return {y[2], y[3], w * y[0], w * y[1]};
    };
    State y{S(1.0), S(0.0), S(0.0), S(1.0)};
    y = integrate_rk4(rhs, x0, x1, y, nsteps);
    for (const S& c : y)
        if (!std::isfinite(std::abs(c)))
            throw IntegrationError("transfer integration diverged (rk4)");
    return y;
}

inline Mat2 to_mat2(const std::array<Complex, 4>& y) {
    // (psi(x1), psi'(x1))^T = M (psi(x0), psi'(x0))^T.
    return Mat2{y[0], y[1], y[2], y[3]};
}

TransferMatrix transfer_over_period(const PeriodicPotential& V, Complex E,
                                    int nsteps = 0, double x0 = 0.0);

// Independent oracle route: different method, halved step.
TransferMatrix transfer_over_period_oracle(const PeriodicPotential& V, Complex E,
                                           int nsteps = 0, double x0 = 0.0);

Complex discriminant(const PeriodicPotential& V, Complex E, int nsteps = 0);

struct DiscriminantWithDerivative {
    Complex value;  // Delta(E)
    Complex dvalue; // Delta'(E), from the variational system
};

DiscriminantWithDerivative discriminant_with_derivative(const PeriodicPotential& V,
                                                        Complex E, int nsteps = 0);

// Period map together with its E-derivative (variational equation).
struct TransferWithDerivative {
    Mat2 m;
    Mat2 dm;
};

TransferWithDerivative transfer_with_derivative(const PeriodicPotential& V, Complex E,
                                                int nsteps = 0, double x0 = 0.0);

} // namespace adiawkb
