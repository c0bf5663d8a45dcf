#include "adiawkb/quasimomentum.hpp"

#include <cmath>

#include "adiawkb/branch_tracking.hpp"
#include "adiawkb/errors.hpp"
#include "adiawkb/transfer.hpp"

namespace adiawkb {

namespace {

double acosh_clamped(double x) { return std::acosh(std::max(x, 1.0)); }

void require_off_edge(const BandStructure& bs, Complex E) {
    if (bs.distance_to_edge(E) < edge_tolerance)
        throw BranchPointProximityError(
            "energy within edge tolerance of a band edge; use the local "
            "square-root model instead (E = " +
            std::to_string(E.real()) + " + " + std::to_string(E.imag()) + "i)");
}

} // namespace

Complex quasi_momentum_real(const PeriodicPotential& V, const BandStructure& bs,
                            double E) {
    require_off_edge(bs, Complex(E));
    const auto loc = bs.locate(E);
    if (!loc)
        throw ValidationError("quasi_momentum: E above the computed band range");
    const double delta = discriminant(V, Complex(E)).real();
    if (loc->in_band) {
        const int n = loc->index;
        const double a = std::acos(std::clamp(delta / 2.0, -1.0, 1.0));
        return (n % 2 == 1) ? Complex((n - 1) * pi + a) : Complex(n * pi - a);
    }
    const int n = loc->index;
    return Complex(n * pi, acosh_clamped(std::abs(delta) / 2.0));
}

Complex quasi_momentum(const BandStructure& bs, const PeriodicPotential& V,
                       Complex E, int l) {
    require_off_edge(bs, E);
    if (l < 0) throw ValidationError("quasi_momentum: negative branch index");
    if (std::abs(E.imag()) < 1e-14 && (l == 0 || E.imag() >= 0.0)) {
        // on the real axis both k_0 and k_l mean the limit from above, except
        // k_l inside its own gap, where the classification value already is
        // the analytic one
        return quasi_momentum_real(V, bs, E.real());
    }

    BranchTracker tracker([&](Complex z) { return discriminant(V, z); });

    // anchor below the spectrum, where the branch is i * arccosh(Delta/2)
    const double e1 = bs.edge(1);
    const double a = e1 - std::max(1.0, 0.25 * std::abs(E - e1));
    const Complex k_anchor(0.0, acosh_clamped(discriminant(V, Complex(a)).real() / 2.0));

    std::vector<Complex> path;
    const double hh = std::max(1.0, 1.5 * std::abs(E.imag()));
    if (E.imag() > 0.0 || l == 0) {
        const double s = (E.imag() >= 0.0) ? 1.0 : -1.0;
        path = {Complex(a, 0.0), Complex(a, s * hh), Complex(E.real(), s * hh), E};
    } else {
        // k_l for Im E < 0: descend through gap l, which is not a cut of C_l
        if (l > bs.band_count() - 1 || !bs.gap_open(l))
            throw ValidationError("quasi_momentum: gap " + std::to_string(l) +
                                  " not open / not covered");
        const double gmid = 0.5 * (bs.gap_lower(l) + bs.gap_upper(l));
        path = {Complex(a, 0.0),          Complex(a, hh),
                Complex(gmid, hh),        Complex(gmid, 0.0),
                Complex(gmid, -hh),       Complex(E.real(), -hh),
                E};
    }
    return tracker.continue_along(path, k_anchor);
}

Complex dk_dE(const BandStructure& bs, const PeriodicPotential& V, Complex E,
              int l) {
    const Complex k = quasi_momentum(bs, V, E, l);
    const DiscriminantWithDerivative d = discriminant_with_derivative(V, E);
    const Complex s = std::sin(k);
    if (std::abs(s) < 1e-9)
        throw BranchPointProximityError("dk_dE: sin k vanishes (band edge)");
    return -d.dvalue / (2.0 * s);
}

} // namespace adiawkb
