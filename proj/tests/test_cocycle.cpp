#include "doctest.h"

#include <cmath>
#include <random>

#include "adiawkb/band.hpp"
#include "adiawkb/cocycle.hpp"
#include "adiawkb/errors.hpp"
#include "adiawkb/monodromy.hpp"

using namespace adiawkb;

namespace {
const double golden = 0.5 * (std::sqrt(5.0) - 1.0);

const Mat2 fib{2.0, 1.0, 1.0, 1.0};
const double fib_growth = std::log(0.5 * (3.0 + std::sqrt(5.0)));

MatrixCocycle constant_cocycle(Mat2 m, double h) {
    return {[m](double) { return m; }, h};
}
} // namespace

TEST_CASE("iterate: identity, constant hyperbolic, rotation") {
    const IterationResult id = iterate(constant_cocycle(Mat2::identity(), golden), 0.0, 100);
    for (double v : id.log_norm_increments) CHECK(std::abs(v) < 1e-14);

    const IterationResult fb = iterate(constant_cocycle(fib, golden), 0.0, 2000);
    CHECK(fb.log_norm_increments.back() == doctest::Approx(fib_growth).epsilon(1e-10));

    MatrixCocycle rot{[](double phi) {
                          const double a = 2.0 * pi * phi;
                          return Mat2{std::cos(a), -std::sin(a), std::sin(a),
                                      std::cos(a)};
                      },
                      golden};
    const LyapunovEstimate le = lyapunov(rot, 0.0, 20000);
    CHECK(std::abs(le.value) <= 3.0 * le.stderr_est + 1e-12);
}

TEST_CASE("lyapunov: constant matrix with bootstrap error bars") {
    const LyapunovEstimate le = lyapunov(constant_cocycle(fib, golden), 0.0, 100000);
    CHECK(std::abs(le.value - fib_growth) <= 3.0 * le.stderr_est);
    CHECK(le.stderr_est < 1e-3);
    // deterministic under the same seed
    const LyapunovEstimate le2 = lyapunov(constant_cocycle(fib, golden), 0.0, 100000);
    CHECK(le.stderr_est == le2.stderr_est);
}

TEST_CASE("lyapunov: almost-Mathieu at coupling 2 (long-run oracle)") {
    // transfer cocycle of the almost-Mathieu operator at lambda = 2, E = 0;
    // uniform lower bound ln(lambda) holds at every energy
    MatrixCocycle amo{[](double phi) {
                          return Mat2{Complex(-2.0 * 2.0 * std::cos(2.0 * pi * phi)),
                                      Complex(-1.0), Complex(1.0), Complex(0.0)};
                      },
                      golden};
    const LyapunovEstimate shrt = lyapunov(amo, 0.11, 30000);
    const LyapunovEstimate lng = lyapunov(amo, 0.11, 300000);
    CHECK(std::abs(shrt.value - lng.value) <=
          3.0 * (shrt.stderr_est + lng.stderr_est));
    CHECK(lng.value >= std::log(2.0) - 3.0 * lng.stderr_est);
}

TEST_CASE("rho and v: constant matrix and vanishing off-diagonal") {
    const RhoVSamples s = rho_v([&](double) { return fib; }, golden, 64);
    for (const Complex& r : s.rho) CHECK(std::abs(r - 1.0) < 1e-14);
    for (const Complex& v : s.v) CHECK(std::abs(v - 3.0) < 1e-14);

    auto bad = [](double phi) {
        return Mat2{2.0, std::cos(2.0 * pi * phi), 1.0, 1.0}; // M12 hits zero
    };
    CHECK_THROWS_AS(rho_v(bad, golden, 256), VanishingOffdiagonalError);
}

TEST_CASE("winding: constants, pure phase, positive real function") {
    CHECK(winding([](double) { return Complex(3.0); }, 64) == 0);
    CHECK(winding([](double x) { return std::exp(Complex(0.0, 2.0 * pi * x)); },
                  64) == 1);
    CHECK(winding([](double x) { return Complex(2.0 + std::cos(2.0 * pi * x)); },
                  64) == 0);
}

TEST_CASE("winding: additive under products") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int na = trial % 3 - 1, nb = (trial * 7) % 4 - 2;
        const double ca = 1.5 + uni(rng), cb = 1.5 + uni(rng);
        auto f = [&, na, ca](double x) {
            return std::exp(Complex(0.0, 2.0 * pi * na * x)) *
                   (ca + 0.4 * std::sin(2.0 * pi * x));
        };
        auto g = [&, nb, cb](double x) {
            return std::exp(Complex(0.0, 2.0 * pi * nb * x)) *
                   (cb + 0.3 * std::cos(2.0 * pi * x));
        };
        auto fg = [&](double x) { return f(x) * g(x); };
        CHECK(winding(fg, 128) == winding(f, 128) + winding(g, 128));
    }
}

TEST_CASE("gap certificate: constant cocycle collapse") {
    const GapCertificate c = gap_certificate([&](double) { return fib; }, 0.37, 512);
    CHECK(c.holds);
    CHECK(c.ind_rho == 0);
    CHECK(c.ind_v == 0);
    CHECK(c.theta_lower == doctest::Approx(fib_growth).epsilon(1e-12));
    CHECK(c.theta_upper == doctest::Approx(fib_growth).epsilon(1e-12));
    // measured Lyapunov within the certified bounds
    const LyapunovEstimate le = lyapunov(constant_cocycle(fib, 0.37), 0.0, 100000);
    CHECK(le.value >= c.theta_lower - 0.05);
    CHECK(le.value <= c.theta_upper + 0.05);
}

TEST_CASE("rho and v of the asymptotic model") {
    const PeriodicPotential Vc = PeriodicPotential::cosine();
    static const BandStructure bs = band_edges(Vc, 120.0);
    const double eps = 2.0 * pi / 30.0;
    const double h = std::fmod(2.0 * pi / eps, 1.0);
    MomentumContext ctx(Vc, bs, 0.0737);
    const ActionSet a = compute_actions(ctx, eps, 0.05, false);
    const MonodromyModel m = assemble_model(a);
    const RhoVSamples s =
        rho_v([&m](double phi) { return m.eval(phi); }, h, 256);
    for (int i = 0; i < 256; ++i) {
        // rho = 1 + O(t1) uniformly
        CHECK(std::abs(s.rho[i] - 1.0) <= 10.0 * a.t1 + 1e-12);
        // v recomputed directly from the coefficient table
        const double z = 2.0 * pi * s.phi[i] + m.C;
        const double zb = 2.0 * pi * (s.phi[i] - h) + m.C;
        const Complex m22b = m.d0 + m.d1 * std::exp(Complex(0, zb)) +
                             m.dm1 * std::exp(-Complex(0, zb));
        const Complex v_direct = m.a0 + s.rho[i] * m22b;
        (void)z;
        CHECK(std::abs(s.v[i] - v_direct) < 1e-10 * std::abs(v_direct));
    }
}

TEST_CASE("gap certificate: model at a center fails, off-center holds") {
    const PeriodicPotential Vc = PeriodicPotential::cosine();
    static const BandStructure bs = band_edges(Vc, 120.0);
    const double eps = 2.0 * pi / 30.0;
    const double h = std::fmod(2.0 * pi / eps, 1.0);

    // E at a quantization center (|cos phi1| << t + t1): no certificate
    {
        MomentumContext ctx(Vc, bs, 0.196447308);
        const MonodromyModel m =
            assemble_model(compute_actions(ctx, eps, 0.05, false));
        const GapCertificate c =
            gap_certificate([&m](double phi) { return m.eval(phi); }, h, 1024);
        CHECK(!c.holds);
    }
    // E between centers (|cos phi1| >> t + t1): certificate holds and the
    // iterated model growth lands inside the theta bounds
    {
        MomentumContext ctx(Vc, bs, 0.0737);
        const ActionSet a = compute_actions(ctx, eps, 0.05, false);
        CHECK(std::abs(std::cos(a.phi1)) > 10.0 * (a.t + a.t1));
        const MonodromyModel m = assemble_model(a);
        MatrixCocycle mc{[&m](double phi) { return m.eval(phi); }, h};
        const GapCertificate c = gap_certificate(mc.M, h, 1024);
        CHECK(c.holds);
        const LyapunovEstimate le = lyapunov(mc, 0.0, 20000);
        CHECK(le.value >= c.theta_lower - 0.05);
        CHECK(le.value <= c.theta_upper + 0.05);
    }
}

TEST_CASE("gap certificate: irrational step on the model") {
    // 2 pi / eps deliberately non-integer: h well inside (0, 1)
    const PeriodicPotential Vc = PeriodicPotential::cosine();
    static const BandStructure bs = band_edges(Vc, 120.0);
    const double eps = 0.21;
    const double h = std::fmod(2.0 * pi / eps, 1.0);
    REQUIRE(h > 0.05);
    MomentumContext ctx(Vc, bs, 0.0737);
    const ActionSet a = compute_actions(ctx, eps, 0.05, false);
    const MonodromyModel m = assemble_model(a);
    MatrixCocycle mc{[&m](double phi) { return m.eval(phi); }, h};
    const GapCertificate c = gap_certificate(mc.M, h, 1024);
    CHECK(c.holds);
    const LyapunovEstimate le = lyapunov(mc, 0.13, 30000);
    CHECK(le.value >= c.theta_lower - 0.05);
    CHECK(le.value <= c.theta_upper + 0.05);
}

TEST_CASE("gap certificate: det-1 cocycles have nonnegative exponents") {
    // random trig-polynomial SL2 cocycles: lyapunov >= -3 stderr
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        const double a = uni(rng), b = uni(rng), c = uni(rng);
        MatrixCocycle mc{[=](double phi) {
                             const double x = b + c * std::cos(2.0 * pi * phi + a);
                             return Mat2{Complex(x), Complex(-1.0), Complex(1.0),
                                         Complex(0.0)};
                         },
                         golden};
        const LyapunovEstimate le = lyapunov(mc, 0.0, 30000);
        CHECK(le.value >= -3.0 * le.stderr_est);
    }
}
