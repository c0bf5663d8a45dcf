#include "doctest.h"

#include <cmath>
#include <random>

#include "adiawkb/band.hpp"
#include "adiawkb/bloch.hpp"
#include "adiawkb/errors.hpp"
#include "adiawkb/potential.hpp"
#include "adiawkb/quasimomentum.hpp"
#include "adiawkb/transfer.hpp"

#include "support/oracles.hpp"

using namespace adiawkb;

namespace {
const PeriodicPotential V0 = PeriodicPotential::zero();
const PeriodicPotential Vc = PeriodicPotential::cosine();

const BandStructure& bands0() {
    static const BandStructure bs = band_edges(V0, 120.0);
    return bs;
}
const BandStructure& bandsc() {
    static const BandStructure bs = band_edges(Vc, 120.0);
    return bs;
}
} // namespace

TEST_CASE("potential evaluation") {
    CHECK(V0.eval(0.3) == 0.0);
    CHECK(Vc.eval(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(Vc.eval(0.25)) < 1e-14);
    // periodicity by construction
    const PeriodicPotential V({0.1, 0.5, 0.2}, {0.3});
    for (double x : {-0.7, 0.11, 2.38})
        CHECK(V.eval(x + 1.0) == doctest::Approx(V.eval(x)).epsilon(1e-14));
    CHECK_THROWS_AS(PeriodicPotential(std::vector<double>(40, 1.0), {}),
                    ValidationError);
    // serialization round trip
    const PeriodicPotential W = PeriodicPotential::from_json(V.to_json());
    CHECK(W.cosine_coeffs() == V.cosine_coeffs());
    CHECK(W.sine_coeffs() == V.sine_coeffs());
}

TEST_CASE("transfer matrix: free closed forms") {
    const Mat2 m0 = transfer_over_period(V0, Complex(0.0)).entries;
    CHECK(std::abs(m0.a11 - 1.0) < 1e-12);
    CHECK(std::abs(m0.a12 - 1.0) < 1e-12);
    CHECK(std::abs(m0.a21) < 1e-12);
    CHECK(std::abs(m0.a22 - 1.0) < 1e-12);

    const Mat2 mpi = transfer_over_period(V0, Complex(pi * pi)).entries;
    CHECK(std::abs(mpi.a11 + 1.0) < 1e-12);
    CHECK(std::abs(mpi.a12) < 1e-12);
    CHECK(std::abs(mpi.a21) < 1e-12);
    CHECK(std::abs(mpi.a22 + 1.0) < 1e-12);
}

TEST_CASE("transfer matrix: dual-integrator oracle and det") {
    const TransferMatrix a = transfer_over_period(Vc, Complex(1.0));
    const TransferMatrix b = transfer_over_period_oracle(Vc, Complex(1.0));
    CHECK(frobenius_distance(a.entries, b.entries) < 1e-9);
    // det = 1 for real and complex E
    for (const Complex E : {Complex(0.5), Complex(3.0, 1.5), Complex(-2.0, -0.7)})
        CHECK(transfer_over_period(Vc, E).det_defect() < 1e-9);
}

TEST_CASE("discriminant: free case closed form + symmetry") {
    for (double E : {0.2, 4.0, 4.0 * pi * pi, 77.3}) {
        CHECK(std::abs(discriminant(V0, Complex(E)) -
                       oracles::free_discriminant(Complex(E))) < 1e-9);
    }
    CHECK(std::abs(discriminant(V0, Complex(4.0 * pi * pi)) - 2.0) < 1e-9);
    // dual-integrator cross-check at V = cos(2 pi x), E = 0.5
    const Complex d1 = discriminant(Vc, Complex(0.5));
    const Complex d2 = transfer_over_period_oracle(Vc, Complex(0.5)).entries.trace();
    CHECK(std::abs(d1 - d2) < 1e-9);
    // Delta(conj E) = conj Delta(E); Delta real on the real axis
    const Complex E(1.3, 0.8);
    CHECK(std::abs(discriminant(Vc, std::conj(E)) -
                   std::conj(discriminant(Vc, E))) < 1e-10);
    CHECK(std::abs(discriminant(Vc, Complex(2.2)).imag()) < 1e-12);
}

TEST_CASE("band edges: free case (all gaps closed)") {
    const BandStructure& bs = bands0();
    CHECK(std::abs(bs.edge(1)) < 1e-8);
    REQUIRE(bs.edge_count() >= 7);
    for (int n = 1; n <= 3; ++n) {
        const double expect = (n * pi) * (n * pi);
        CHECK(bs.edge(2 * n) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(bs.edge(2 * n + 1) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(!bs.gap_open(n, 1e-7));
        CHECK(bs.edges()[2 * n - 1].degenerate);
    }
}

TEST_CASE("band edges: Fourier-truncation oracle") {
    const std::vector<double> oracle = oracles::fourier_band_edges(Vc, 6);
    const BandStructure& bs = bandsc();
    for (int l = 1; l <= 4; ++l)
        CHECK(bs.edge(l) == doctest::Approx(oracle[l - 1]).epsilon(1e-8));

    // frozen anchors for the cosine potential (from the 81-mode eigensolver)
    CHECK(bs.edge(1) == doctest::Approx(-0.012661594814).epsilon(1e-9));
    CHECK(bs.edge(2) == doctest::Approx(9.366458121554).epsilon(1e-9));
    CHECK(bs.edge(3) == doctest::Approx(10.366418022026).epsilon(1e-9));
    CHECK(bs.edge(4) == doctest::Approx(39.476306769878).epsilon(1e-9));

    // amplitude 2: first gap strictly open, edges match oracle
    const PeriodicPotential V2 = PeriodicPotential::cosine(2.0);
    const BandStructure bs2 = band_edges(V2, 60.0);
    const std::vector<double> oracle2 = oracles::fourier_band_edges(V2, 4);
    CHECK(bs2.gap_open(1));
    CHECK(bs2.edge(3) - bs2.edge(2) ==
          doctest::Approx(oracle2[2] - oracle2[1]).epsilon(1e-8));
    for (int l = 1; l <= 4; ++l)
        CHECK(bs2.edge(l) == doctest::Approx(oracle2[l - 1]).epsilon(1e-8));

    // interlacing as ordered output
    for (std::size_t j = 0; j + 1 < bs.edge_count(); ++j)
        CHECK(bs.edges()[j].energy <= bs.edges()[j + 1].energy + 1e-12);

    // multi-harmonic potential with a sine term: narrow high gaps, complex
    // Hermitian oracle path
    const PeriodicPotential Vm({0.0, 1.0, 0.0, 0.0, 0.05}, {0.0, 0.3});
    const BandStructure bsm = band_edges(Vm, 120.0);
    const std::vector<double> oraclem = oracles::fourier_band_edges(Vm, 7);
    REQUIRE(bsm.edge_count() >= 7);
    for (int l = 1; l <= 7; ++l)
        CHECK(bsm.edge(l) == doctest::Approx(oraclem[l - 1]).epsilon(1e-8));
}

TEST_CASE("quasi-momentum: free case and branch normalization") {
    CHECK(std::abs(quasi_momentum(bands0(), V0, Complex(pi * pi / 4.0), 0) -
                   Complex(pi / 2.0)) < 1e-10);
    // sign convention below the spectrum: k = i sqrt(|E|)
    const Complex km = quasi_momentum(bands0(), V0, Complex(-0.5), 0);
    CHECK(std::abs(km - Complex(0.0, std::sqrt(0.5))) < 1e-10);
    // inside gap 1 of cos(2 pi x): Re k = pi, Im k > 0
    const double gmid = 0.5 * (bandsc().edge(2) + bandsc().edge(3));
    const Complex kg = quasi_momentum(bandsc(), Vc, Complex(gmid), 1);
    CHECK(std::abs(kg.real() - pi) < 1e-8);
    CHECK(kg.imag() > 0.0);
    // edge proximity refused
    CHECK_THROWS_AS(quasi_momentum(bandsc(), Vc, Complex(bandsc().edge(1) + 1e-10), 0),
                    BranchPointProximityError);
}

TEST_CASE("quasi-momentum: reflection identities across the cut") {
    // reflection relations on both sides of the cut, genuine continuations
    const double E_band = 0.5 * (bandsc().edge(1) + bandsc().edge(2));
    for (double d : {1e-4, 1e-3}) {
        const Complex up = quasi_momentum(bandsc(), Vc, Complex(E_band, d), 0);
        const Complex dn = quasi_momentum(bandsc(), Vc, Complex(E_band, -d), 0);
        CHECK(std::abs(up + std::conj(dn)) < 1e-8);
    }
    // gap branch: k_l(E+i0) + conj(k_l(E-i0)) = 2 pi l outside [E2l, E2l+1]
    const double E_out = bandsc().edge(1) + 0.3 * (bandsc().edge(2) - bandsc().edge(1));
    for (double d : {1e-4, 1e-3}) {
        const Complex up = quasi_momentum(bandsc(), Vc, Complex(E_out, d), 1);
        const Complex dn = quasi_momentum(bandsc(), Vc, Complex(E_out, -d), 1);
        CHECK(std::abs(up + std::conj(dn) - 2.0 * pi) < 1e-8);
    }
}

TEST_CASE("randomized potentials: conservation, symmetry, oracle edges") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> uni(-0.8, 0.8);
    for (int trial = 0; trial < 4; ++trial) {
        const PeriodicPotential V({0.0, uni(rng), 0.5 * uni(rng)},
                                  {uni(rng), 0.3 * uni(rng)});
        // Wronskian conservation at random complex energies
        for (int k = 0; k < 3; ++k) {
            const Complex E(4.0 * uni(rng), 2.0 * uni(rng));
            CHECK(transfer_over_period(V, E).det_defect() < 1e-9);
            CHECK(std::abs(discriminant(V, std::conj(E)) -
                           std::conj(discriminant(V, E))) < 1e-9);
        }
        // first edges against the spectral oracle
        const BandStructure bs = band_edges(V, 45.0);
        const std::vector<double> oracle = oracles::fourier_band_edges(V, 4);
        for (int l = 1; l <= 4; ++l)
            CHECK(bs.edge(l) == doctest::Approx(oracle[l - 1]).epsilon(1e-8));
    }
}

TEST_CASE("quasi-momentum: monotone across band 1") {
    double prev = -1.0;
    const double e1 = bandsc().edge(1), e2 = bandsc().edge(2);
    for (int i = 0; i < 7; ++i) {
        const double E = e1 + (e2 - e1) * (i + 0.5) / 7.0;
        const double k = quasi_momentum(bandsc(), Vc, Complex(E), 0).real();
        CHECK(k > prev);
        CHECK(k > 0.0);
        CHECK(k < pi);
        prev = k;
    }
}

TEST_CASE("quasi-momentum: large-E asymptotics") {
    // |k0(E) - sqrt(E)| <= C / sqrt(|E|) on a log-spaced grid
    double worst = 0.0;
    for (double E = 10.0; E <= 110.0; E *= 1.6) {
        if (bandsc().distance_to_edge(E) < 1e-3) continue;
        const Complex k = quasi_momentum(bandsc(), Vc, Complex(E), 0);
        worst = std::max(worst, std::abs(k - std::sqrt(Complex(E))) * std::sqrt(E));
    }
    CHECK(worst < 1.0);
}

TEST_CASE("dk_dE: free case and finite-difference oracle") {
    CHECK(std::abs(dk_dE(bands0(), V0, Complex(4.0), 0) - Complex(0.25)) < 1e-10);
    CHECK(std::abs(dk_dE(bands0(), V0, Complex(-1.0), 0) - Complex(0.0, -0.5)) <
          1e-10);
    const double mid = 0.5 * (bandsc().edge(1) + bandsc().edge(2));
    const double h = 1e-5;
    const Complex fd = (quasi_momentum(bandsc(), Vc, Complex(mid + h), 0) -
                        quasi_momentum(bandsc(), Vc, Complex(mid - h), 0)) /
                       (2.0 * h);
    const Complex an = dk_dE(bandsc(), Vc, Complex(mid), 0);
    CHECK(std::abs(fd - an) / std::abs(an) < 1e-6);
}

TEST_CASE("Bloch solutions: free plane waves and dichotomy") {
    const BlochPair p = bloch_solutions(V0, bands0(), Complex(1.0));
    for (double x : {0.1, 0.45, 0.8}) {
        CHECK(std::abs(p.p_plus(x) - 1.0) < 1e-10);
        CHECK(std::abs(p.p_minus(x) - 1.0) < 1e-10);
    }
    const BlochPair pm = bloch_solutions(V0, bands0(), Complex(-1.0));
    const BlochValues v = pm.eval(1.0);
    CHECK(std::abs(std::abs(v.psi_plus) - std::exp(-1.0)) < 1e-10);
}

TEST_CASE("Bloch solutions: multiplier, Wronskian constancy, degeneracy") {
    const double mid = 0.5 * (bandsc().edge(1) + bandsc().edge(2));
    const BlochPair p = bloch_solutions(Vc, bandsc(), Complex(mid));
    const Complex k = quasi_momentum(bandsc(), Vc, Complex(mid), 0);
    const BlochValues at1 = p.eval(1.0);
    CHECK(std::abs(at1.psi_plus - std::exp(Complex(0, 1) * k)) < 1e-8);
    CHECK(std::abs(at1.psi_minus - std::exp(-Complex(0, 1) * k)) < 1e-8);
    // solution residual against the independent half-step RK4 route:
    // re-propagate the same Cauchy data and compare along the period
    for (double x : {0.25, 0.6, 0.95}) {
        auto q = [&](double u) { return Vc.eval(u); };
        const auto y = propagate_rk4<Complex>(q, Complex(mid), 0.0, x, 1200);
        const Complex psi_ref = y[0] + y[1] * p.m_plus();
        CHECK(std::abs(p.eval(x).psi_plus - psi_ref) < 1e-8);
    }
    // periodic components periodic; Wronskian constant in x
    for (double x : {0.2, 0.6}) {
        CHECK(std::abs(p.p_plus(x + 1.0) - p.p_plus(x)) < 1e-9);
        const BlochValues v = p.eval(x);
        const Complex w = v.dpsi_plus * v.psi_minus - v.dpsi_minus * v.psi_plus;
        CHECK(std::abs(w - p.wronskian()) < 1e-9);
    }
    CHECK_THROWS_AS(bloch_solutions(Vc, bandsc(), Complex(bandsc().edge(2))),
                    DegenerateFloquetError);
}

TEST_CASE("period integral identity: plane-wave sign anchor") {
    // V = 0, E = 1: int psi+ psi- = 1 and -i k' w = -i (1/2)(2i) = 1
    CHECK(period_integral_residual(V0, bands0(), Complex(1.0), 1.0) < 1e-10);
}

TEST_CASE("period integral identity: grid across band and gap") {
    double worst = 0.0;
    const double e1 = bandsc().edge(1), e2 = bandsc().edge(2),
                 e3 = bandsc().edge(3);
    for (int i = 0; i < 5; ++i) {
        const double Eb = e1 + (e2 - e1) * (i + 0.5) / 5.0;
        const double Eg = e2 + (e3 - e2) * (i + 0.5) / 5.0;
        for (double x : {0.3, 1.0}) {
            worst = std::max(worst, period_integral_residual(Vc, bandsc(), Complex(Eb), x));
            worst = std::max(worst, period_integral_residual(Vc, bandsc(), Complex(Eg), x));
        }
    }
    CHECK(worst < 1e-6);
}
