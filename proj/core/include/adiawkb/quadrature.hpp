#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "adiawkb/errors.hpp"
#include "adiawkb/types.hpp"

namespace adiawkb {

// Gauss-Legendre rule on [-1, 1]; nodes ascending. Cached per order.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int n);

namespace detail {

// QUADPACK 15-point Kronrod extension of 7-point Gauss (positive half).
inline constexpr double gk15_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};

inline constexpr double gk15_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};

inline constexpr double gk15_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
auto gk15_panel(const F& f, double a, double b, double& err)
    -> std::invoke_result_t<F, double> {
    using R = std::invoke_result_t<F, double>;
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    R kronrod{};
    R gauss{};
    for (int i = 0; i < 8; ++i) {
        const double dx = hw * gk15_nodes[i];
        const R fval = (i == 7) ? f(c) : R(f(c - dx) + f(c + dx));
        kronrod += gk15_wk[i] * fval;
        if (i % 2 == 1) gauss += gk15_wg[i / 2] * fval;
    }
    kronrod *= hw;
    gauss *= hw;
    err = std::abs(kronrod - gauss);
    return kronrod;
}

} // namespace detail

// Adaptive Gauss-Kronrod bisection to an absolute tolerance. Panels that hit
// the depth cap are accepted with their error estimate; the run fails only
// when the accumulated estimate exceeds the budget, so isolated integrable
// corners do not abort integrals that are globally fine.
template <class F>
auto integrate_adaptive(const F& f, double a, double b, double abs_tol,
                        int max_depth = 48) -> std::invoke_result_t<F, double> {
    using R = std::invoke_result_t<F, double>;
    struct Panel {
        double a, b, tol;
        int depth;
    };
    R total{};
    double err_total = 0.0;
    std::vector<Panel> stack{{a, b, abs_tol, 0}};
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        double err = 0.0;
        const R val = detail::gk15_panel(f, p.a, p.b, err);
        if (err <= p.tol || p.depth >= max_depth) {
            total += val;
            err_total += err;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        stack.push_back({p.a, m, 0.5 * p.tol, p.depth + 1});
        stack.push_back({m, p.b, 0.5 * p.tol, p.depth + 1});
    }
    if (err_total > 64.0 * abs_tol)
        throw NumericalError("adaptive quadrature: error budget exceeded");
    return total;
}

// Fixed n-node Gauss-Legendre on [a, b].
template <class F>
auto integrate_gl(const F& f, double a, double b, int n)
    -> std::invoke_result_t<F, double> {
    using R = std::invoke_result_t<F, double>;
    const GaussLegendreRule& rule = gauss_legendre(n);
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    R total{};
    for (int i = 0; i < n; ++i)
        total += rule.weights[i] * f(c + hw * rule.nodes[i]);
    return hw * total;
}

// Integral with an inverse-square-root (or milder) endpoint singularity at
// `edge`: substitute distance = s^2 so the transformed integrand is regular.
// Integrates f over [a, b] where edge is either a or b; nodes never touch it.
template <class F>
auto integrate_sqrt_endpoint(const F& f, double a, double b, double edge, int n)
    -> std::invoke_result_t<F, double> {
    using R = std::invoke_result_t<F, double>;
    const bool at_left = std::abs(edge - a) <= std::abs(edge - b);
    const double len = b - a;
    const double smax = std::sqrt(len);
    auto g = [&](double s) -> R {
        const double off = s * s;
        const double x = at_left ? a + off : b - off;
        return 2.0 * s * f(x);
    };
    // Either substitution x = a + s^2 or x = b - s^2 turns the integral into
    // int_0^smax 2 s f ds with positive orientation.
    return integrate_gl(g, 0.0, smax, n);
}

} // namespace adiawkb
