#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace adiawkb {

// Fixed-step explicit Runge-Kutta integration. Two methods are provided on
// purpose: the 13-stage Fehlberg 7(8) pair (its order-8 weights) as the
// production integrator, and classical RK4 as the independent cross-check.
// Reproducibility beats adaptivity here: every run takes identical steps.

namespace detail {

// Fehlberg 7(8) tableau, order-8 weights.
inline constexpr int rkf78_stages = 13;

inline constexpr double rkf78_a[rkf78_stages] = {
    0.0,       2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 0.5,
    5.0 / 6.0, 1.0 / 6.0,  2.0 / 3.0, 1.0 / 3.0, 1.0,        0.0,
    1.0};

inline constexpr double rkf78_b[rkf78_stages][rkf78_stages - 1] = {
    {},
    {2.0 / 27.0},
    {1.0 / 36.0, 1.0 / 12.0},
    {1.0 / 24.0, 0.0, 1.0 / 8.0},
    {5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0},
    {1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0},
    {-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0},
    {31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0},
    {2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0},
    {-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0,
     -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0},
    {2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0,
     2133.0 / 4100.0, 45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0},
    {3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0,
     3.0 / 41.0, 6.0 / 41.0, 0.0},
    {-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0,
     -289.0 / 82.0, 2193.0 / 4100.0, 51.0 / 82.0, 33.0 / 164.0, 12.0 / 41.0,
     0.0, 1.0}};

inline constexpr double rkf78_c[rkf78_stages] = {
    0.0,        0.0,       0.0,       0.0,         0.0,
    34.0 / 105.0, 9.0 / 35.0, 9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0,
    0.0,        41.0 / 840.0, 41.0 / 840.0};

} // namespace detail

// One RKF78 step of size h for y' = f(x, y), State = std::array<Scalar, N>.
template <class State, class Rhs>
State rkf78_step(const Rhs& f, double x, const State& y, double h) {
    using detail::rkf78_a;
    using detail::rkf78_b;
    using detail::rkf78_c;
    using detail::rkf78_stages;

    constexpr std::size_t n = std::tuple_size<State>::value;
    std::array<State, rkf78_stages> k;
    k[0] = f(x, y);
    for (int s = 1; s < rkf78_stages; ++s) {
        State ytmp = y;
        for (int j = 0; j < s; ++j) {
            const double b = rkf78_b[s][j];
            if (b == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) ytmp[i] += h * b * k[j][i];
        }
        k[s] = f(x + rkf78_a[s] * h, ytmp);
    }
    State out = y;
    for (int s = 0; s < rkf78_stages; ++s) {
        const double c = rkf78_c[s];
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out[i] += h * c * k[s][i];
    }
    return out;
}

template <class State, class Rhs>
State rk4_step(const Rhs& f, double x, const State& y, double h) {
    constexpr std::size_t n = std::tuple_size<State>::value;
    const State k1 = f(x, y);
    State ytmp = y;
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
    const State k2 = f(x + 0.5 * h, ytmp);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
    const State k3 = f(x + 0.5 * h, ytmp);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * k3[i];
    const State k4 = f(x + h, ytmp);
    State out = y;
    for (std::size_t i = 0; i < n; ++i)
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

template <class State, class Rhs>
State integrate_rkf78(const Rhs& f, double x0, double x1, State y, int nsteps) {
    const double h = (x1 - x0) / nsteps;
    for (int i = 0; i < nsteps; ++i) y = rkf78_step(f, x0 + i * h, y, h);
    return y;
}

template <class State, class Rhs>
State integrate_rk4(const Rhs& f, double x0, double x1, State y, int nsteps) {
    const double h = (x1 - x0) / nsteps;
    for (int i = 0; i < nsteps; ++i) y = rk4_step(f, x0 + i * h, y, h);
    return y;
}

// Monotone forward sampler: integrates once and lets callers pull the state
// at an increasing sequence of points (quadrature nodes over a solution).
template <class State, class Rhs>
class OdePath {
  public:
    OdePath(Rhs f, double x0, State y0, double hmax)
        : f_(std::move(f)), x_(x0), y_(std::move(y0)), hmax_(hmax) {}

    const State& advance_to(double x) {
        while (x - x_ > 1e-14) {
            const double h = std::min(hmax_, x - x_);
            y_ = rkf78_step(f_, x_, y_, h);
            x_ += h;
        }
        return y_;
    }

    double position() const { return x_; }

  private:
    Rhs f_;
    double x_;
    State y_;
    double hmax_;
};

} // namespace adiawkb
