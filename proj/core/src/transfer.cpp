#include "adiawkb/transfer.hpp"

namespace adiawkb {

namespace {

int pick_steps(const PeriodicPotential& V, Complex E, int requested) {
    if (requested > 0) return requested;
    const double scale = std::abs(E) + std::abs(V.mean()) + V.oscillation_bound();
    return transfer_steps(scale);
}

} // namespace

TransferMatrix transfer_over_period(const PeriodicPotential& V, Complex E,
                                    int nsteps, double x0) {
    const int n = pick_steps(V, E, nsteps);
    auto q = [&](double x) { return V.eval(x); };
    try {
        return {to_mat2(propagate<Complex>(q, E, x0, x0 + 1.0, n)), E};
    } catch (const IntegrationError&) {
        throw IntegrationError("transfer integration failed at E = (" +
                               std::to_string(E.real()) + ", " +
                               std::to_string(E.imag()) + ")");
    }
}

TransferMatrix transfer_over_period_oracle(const PeriodicPotential& V, Complex E,
                                           int nsteps, double x0) {
    const int n = 2 * pick_steps(V, E, nsteps);
    auto q = [&](double x) { return V.eval(x); };
    return {to_mat2(propagate_rk4<Complex>(q, E, x0, x0 + 1.0, n)), E};
}

Complex discriminant(const PeriodicPotential& V, Complex E, int nsteps) {
    return transfer_over_period(V, E, nsteps).entries.trace();
}

TransferWithDerivative transfer_with_derivative(const PeriodicPotential& V, Complex E,
                                                int nsteps, double x0) {
    const int n = pick_steps(V, E, nsteps);
    // Augmented system: both Cauchy columns plus their E-derivatives.
    // d/dx (dM/dE) = A (dM/dE) + (dA/dE) M with dA/dE = [[0,0],[-1,0]].
    using State = std::array<Complex, 8>;
    auto rhs = [&](double x, const State& y) -> State {
        const Complex w = Complex(V.eval(x)) - E;
        return {y[2],        y[3],        w * y[0],        w * y[1],
                y[6],        y[7],        w * y[4] - y[0], w * y[5] - y[1]};
    };
    State y{1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    y = integrate_rkf78(rhs, x0, x0 + 1.0, y, n);
    for (const Complex& c : y)
        if (!std::isfinite(std::abs(c)))
            throw IntegrationError("variational transfer integration diverged");
    return {Mat2{y[0], y[1], y[2], y[3]}, Mat2{y[4], y[5], y[6], y[7]}};
}

DiscriminantWithDerivative discriminant_with_derivative(const PeriodicPotential& V,
                                                        Complex E, int nsteps) {
    const TransferWithDerivative t = transfer_with_derivative(V, E, nsteps);
    return {t.m.trace(), t.dm.trace()};
}

} // namespace adiawkb
