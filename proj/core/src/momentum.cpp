#include "adiawkb/momentum.hpp"

#include <algorithm>
#include <cmath>

#include "adiawkb/branch_tracking.hpp"
#include "adiawkb/errors.hpp"
#include "adiawkb/transfer.hpp"

namespace adiawkb {

namespace {

constexpr double phi_guard = 1e-7; // min distance from branch points, angle units

// distance between phi and p modulo the 2 pi lattice in Re
double lattice_distance(Complex phi, Complex p) {
    double dre = std::fmod(phi.real() - p.real(), 2.0 * pi);
    if (dre > pi) dre -= 2.0 * pi;
    if (dre < -pi) dre += 2.0 * pi;
    const double dim = phi.imag() - p.imag();
    return std::hypot(dre, dim);
}

// does segment [a, b] cross the horizontal segment Im = 0,
// Re in [lo + 2 pi m, hi + 2 pi m] for some m?
bool crosses_horizontal(Complex a, Complex b, double lo, double hi) {
    const double ya = a.imag(), yb = b.imag();
    if ((ya > 0.0 && yb > 0.0) || (ya < 0.0 && yb < 0.0)) return false;
    if (ya == 0.0 && yb == 0.0) {
        // segment lies on the axis: crossing iff it overlaps the cut interior
        double xlo = std::min(a.real(), b.real());
        double xhi = std::max(a.real(), b.real());
        const double m = std::floor((xlo - lo) / (2.0 * pi));
        for (double mm = m - 1; mm <= m + 2; ++mm) {
            const double clo = lo + 2.0 * pi * mm, chi = hi + 2.0 * pi * mm;
            if (xhi > clo + 1e-12 && xlo < chi - 1e-12) return true;
        }
        return false;
    }
    const double t = ya / (ya - yb);
    if (t < 0.0 || t > 1.0) return false;
    const double xc = a.real() + t * (b.real() - a.real());
    double r = std::fmod(xc - lo, 2.0 * pi);
    if (r < 0.0) r += 2.0 * pi;
    return r <= hi - lo;
}

// does segment [a, b] cross a vertical cut Re = pi + 2 pi m,
// |Im| in [elo, ehi]?
bool crosses_vertical(Complex a, Complex b, double elo, double ehi) {
    const double xa = a.real() - pi, xb = b.real() - pi;
    // check each lattice line the segment's Re range spans
    const double lo = std::min(xa, xb), hi = std::max(xa, xb);
    for (double m = std::ceil((lo - 1e-12) / (2.0 * pi));
         m * 2.0 * pi <= hi + 1e-12; m += 1.0) {
        const double line = m * 2.0 * pi;
        if (std::abs(xb - xa) < 1e-15) {
            if (std::abs(xa - line) > 1e-12) continue;
            // vertical segment on the cut line: overlap test
            const double ylo = std::min(a.imag(), b.imag());
            const double yhi = std::max(a.imag(), b.imag());
            if ((yhi > elo + 1e-12 && ylo < ehi - 1e-12) ||
                (yhi > -ehi + 1e-12 && ylo < -elo - 1e-12))
                return true;
            continue;
        }
        const double t = (line - xa) / (xb - xa);
        if (t < 0.0 || t > 1.0) continue;
        const double yc = a.imag() + t * (b.imag() - a.imag());
        if ((yc >= elo && yc <= ehi) || (yc >= -ehi && yc <= -elo)) return true;
    }
    return false;
}

} // namespace

MomentumContext::MomentumContext(PeriodicPotential V, BandStructure bs, double E)
    : V_(std::move(V)), bs_(std::move(bs)), E_(E) {
    if (bs_.edge_count() < 1)
        throw ValidationError("MomentumContext: empty band structure");
    const double e1 = bs_.edge(1);
    if (std::abs(E_ - e1) <= 1.0) phi1_ = std::acos(E_ - e1);
    for (std::size_t l = 2; l <= bs_.edge_count(); ++l) {
        const double el = bs_.edge(static_cast<int>(l));
        if (el - E_ >= 1.0) eta_.push_back(std::acosh(el - E_));
    }
    std::sort(eta_.begin(), eta_.end());
}

bool MomentumContext::window_ok(double delta, std::string* why) const {
    const auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    if (bs_.edge_count() < 3)
        return fail("band structure does not cover E3");
    const double e1 = bs_.edge(1), e2 = bs_.edge(2), e3 = bs_.edge(3);
    if (!(E_ - 1.0 <= e1 - delta))
        return fail("E - 1 <= E1 - delta violated");
    if (!(e1 + delta < E_ + 1.0))
        return fail("E1 + delta < E + 1 violated");
    if (!(E_ + 1.0 < e2 - delta))
        return fail("E + 1 < E2 - delta violated");
    if (!(e2 < e3))
        return fail("E2 < E3 violated (first gap closed)");
    return true;
}

void MomentumContext::require_window(double delta) const {
    std::string why;
    if (!window_ok(delta, &why)) {
        if (why.find("first gap closed") != std::string::npos)
            throw ClosedGapError("energy window violated: " + why);
        throw WindowViolationError("energy window violated: " + why);
    }
}

BranchPoints MomentumContext::branch_points(int l_max) const {
    if (phi1_ < 0.0) {
        const char* which = (E_ - bs_.edge(1) > 1.0)
                                ? "E - 1 <= E1 - delta violated"
                                : "E1 + delta < E + 1 violated";
        throw WindowViolationError(std::string("no real branch point (") +
                                   which + "; |E - E1| > 1)");
    }
    BranchPoints bp;
    bp.phi1 = phi1_;
    const int n_edges = static_cast<int>(bs_.edge_count());
    for (int l = 2; l <= std::min(l_max, n_edges); ++l) {
        const double el = bs_.edge(l);
        if (el - E_ >= 1.0)
            bp.phi_upper.push_back(Complex(pi, std::acosh(el - E_)));
    }
    return bp;
}

double MomentumContext::branch_point_distance(Complex phi) const {
    double d = std::numeric_limits<double>::infinity();
    if (phi1_ >= 0.0) {
        d = std::min(d, lattice_distance(phi, Complex(phi1_, 0.0)));
        d = std::min(d, lattice_distance(phi, Complex(-phi1_, 0.0)));
    }
    for (double eta : eta_) {
        d = std::min(d, lattice_distance(phi, Complex(pi, eta)));
        d = std::min(d, lattice_distance(phi, Complex(pi, -eta)));
    }
    return d;
}

Complex MomentumContext::delta_at(Complex phi) const {
    return discriminant(V_, cal_E(phi));
}

Complex MomentumContext::kappa0_anchor() const {
    // cal_E(0) = E - 1 is below the spectrum whenever the window holds;
    // anchor condition: Re kappa0(0) = 0, Im kappa0(0) > 0
    const Complex ce = cal_E(0.0);
    if (ce.real() >= bs_.edge(1) - 1e-12)
        throw WindowViolationError(
            "kappa0 anchor: E - 1 not below the spectrum");
    const double d = delta_at(0.0).real();
    return Complex(0.0, std::acosh(std::max(d / 2.0, 1.0)));
}

Complex MomentumContext::kappa1_anchor() const {
    // cal_E(pi) = E + 1 must be inside band 1: 0 < kappa1(pi) < pi
    const double ce = E_ + 1.0;
    if (!(ce > bs_.edge(1) && ce < bs_.edge(2)))
        throw WindowViolationError("kappa1 anchor: E + 1 not inside band 1");
    return Complex(band1_momentum(ce), 0.0);
}

bool MomentumContext::crosses_cut(MomentumBranchTag branch, Complex a,
                                  Complex b) const {
    if (phi1_ >= 0.0) {
        if (branch == MomentumBranchTag::kappa0 &&
            crosses_horizontal(a, b, phi1_, 2.0 * pi - phi1_))
            return true;
        if (branch == MomentumBranchTag::kappa1 &&
            crosses_horizontal(a, b, -phi1_, phi1_))
            return true;
    }
    // vertical cuts between consecutive eta pairs (open gaps above band 1)
    for (std::size_t i = 0; i + 1 < eta_.size(); i += 2)
        if (crosses_vertical(a, b, eta_[i], eta_[i + 1])) return true;
    return false;
}

Complex MomentumContext::track_along(const std::vector<Complex>& path,
                                     Complex start) const {
    BranchTracker tracker([this](Complex phi) { return delta_at(phi); });
    return tracker.continue_along(path, start);
}

Complex MomentumContext::kappa(MomentumBranchTag branch, Complex phi) const {
    if (branch == MomentumBranchTag::kappa_star) {
        if (std::abs(phi.imag()) > 1e-14)
            throw ValidationError("kappa_star is defined on the real line");
        return kappa_star(phi.real());
    }
    if (branch_point_distance(phi) < phi_guard)
        throw BranchPointProximityError(
            "kappa: evaluation point within guard distance of a branch point");
    const Complex anchor =
        branch == MomentumBranchTag::kappa0 ? Complex(0.0) : Complex(pi);
    if (crosses_cut(branch, anchor, phi))
        throw CutCrossingError(
            "default straight path from the anchor crosses a branch cut; "
            "use continue_kappa_along with an explicit path");
    const Complex start = branch == MomentumBranchTag::kappa0 ? kappa0_anchor()
                                                              : kappa1_anchor();
    return track_along({anchor, phi}, start);
}

std::vector<Complex> MomentumContext::continue_kappa_along(
    MomentumBranchTag branch, const std::vector<Complex>& path) const {
    if (path.empty()) throw ValidationError("empty continuation path");
    for (const Complex& p : path)
        if (branch_point_distance(p) < phi_guard)
            throw BranchPointProximityError(
                "continuation path vertex too close to a branch point");
    const Complex anchor =
        branch == MomentumBranchTag::kappa0 ? Complex(0.0) : Complex(pi);
    const Complex start = branch == MomentumBranchTag::kappa0 ? kappa0_anchor()
                                                              : kappa1_anchor();
    // reach the path head first (default leg), then walk the user's path
    Complex head = start;
    if (std::abs(path.front() - anchor) > 1e-15) {
        if (crosses_cut(branch, anchor, path.front()))
            throw CutCrossingError(
                "lead-in segment from the anchor to the path head crosses a "
                "cut; start the path at the anchor instead");
        head = track_along({anchor, path.front()}, start);
    }
    std::vector<Complex> out;
    out.reserve(path.size());
    out.push_back(head);
    Complex cur = head;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        cur = track_along({path[i], path[i + 1]}, cur);
        out.push_back(cur);
    }
    return out;
}

Complex MomentumContext::kappa_star(double phi) const {
    const double ce = E_ - std::cos(phi);
    const double e1 = bs_.edge(1);
    if (ce < e1) return Complex(0.0, below_gap0_momentum_abs(ce));
    if (bs_.edge_count() >= 2 && ce <= bs_.edge(2))
        return Complex(band1_momentum(ce), 0.0);
    throw ValidationError(
        "kappa_star: E - cos(phi) above band 1 (outside the isoenergy curve)");
}

double MomentumContext::band1_momentum(double cal_e) const {
    const double d = discriminant(V_, Complex(cal_e)).real();
    return std::acos(std::clamp(d / 2.0, -1.0, 1.0));
}

double MomentumContext::below_gap0_momentum_abs(double cal_e) const {
    const double d = discriminant(V_, Complex(cal_e)).real();
    return std::acosh(std::max(d / 2.0, 1.0));
}

double MomentumContext::band1_dk_dE(double cal_e) const {
    const DiscriminantWithDerivative d =
        discriminant_with_derivative(V_, Complex(cal_e));
    const double k = std::acos(std::clamp(d.value.real() / 2.0, -1.0, 1.0));
    const double s = std::sin(k);
    if (s < 1e-150) throw BranchPointProximityError("band1_dk_dE at a band edge");
    return -d.dvalue.real() / (2.0 * s);
}

std::vector<StokesLine> MomentumContext::stokes_lines(Complex from_point,
                                                      double max_arc,
                                                      double step) const {
    if (branch_point_distance(from_point) > 1e-6)
        throw ValidationError("stokes_lines: from_point is not a branch point");

    const double r0 = 1e-3;
    // probe kappa near the point to get the square-root coefficient c
    const Complex probe_dir =
        std::abs(from_point.imag()) < 1e-12 ? Complex(0.0, 1.0) : Complex(-1.0, 0.0);
    const Complex probe_pt = from_point + 2.0 * r0 * probe_dir;

    // lead-in path from the kappa0 anchor to the probe point
    std::vector<Complex> lead{Complex(0.0)};
    if (std::abs(from_point.imag()) < 1e-12) {
        lead.push_back(Complex(std::max(0.0, from_point.real() - 2.0 * r0), 0.0));
    } else {
        lead.push_back(Complex(0.0, probe_pt.imag()));
    }
    lead.push_back(probe_pt);
    Complex kappa_probe = track_along(lead, kappa0_anchor());
    // value of the continued branch at the branch point: a multiple of pi
    const Complex kappa_bp(pi * std::round(kappa_probe.real() / pi), 0.0);
    const Complex c = (kappa_probe - kappa_bp) / std::sqrt(probe_pt - from_point);

    std::vector<StokesLine> lines;
    BranchTracker tracker([this](Complex phi) { return delta_at(phi); });

    for (int j = 0; j < 3; ++j) {
        const double theta = (2.0 / 3.0) * (j * pi - std::arg(c));
        StokesLine line;
        line.points.push_back(from_point);

        // walk from the probe point around the circle of radius r0 to the seed
        const double theta_probe = std::arg(probe_pt - from_point);
        std::vector<Complex> arc{probe_pt};
        const int narc = 12;
        for (int a = 1; a <= narc; ++a) {
            const double th = theta_probe + (theta - theta_probe) * a / narc;
            arc.push_back(from_point + r0 * std::exp(Complex(0.0, th)));
        }
        Complex kappa_cur;
        try {
            kappa_cur = tracker.continue_along(arc, kappa_probe);
        } catch (const NumericalError&) {
            continue; // seed arc pinched between branch points; skip direction
        }
        Complex phi_cur = arc.back();
        line.points.push_back(phi_cur);

        // running action S = int (kappa - kappa_bp) dxi, seeded by the local
        // square-root model (2c/3) (phi - phi0)^{3/2}
        Complex S = (2.0 / 3.0) * c * std::pow(phi_cur - from_point, 1.5);
        Complex tau_prev = std::exp(Complex(0.0, theta));
        double arclen = r0;
        bool finite = false;

        while (arclen < max_arc) {
            const Complex u = kappa_cur - kappa_bp;
            if (std::abs(u) < 1e-12) break;
            Complex tau = std::conj(u) / std::abs(u);
            if ((tau * std::conj(tau_prev)).real() < 0.0) tau = -tau;

            // midpoint predictor
            Complex phi_mid, kappa_mid;
            try {
                phi_mid = phi_cur + 0.5 * step * tau;
                kappa_mid = tracker.continue_along({phi_cur, phi_mid}, kappa_cur);
                const Complex um = kappa_mid - kappa_bp;
                Complex tau_mid = std::conj(um) / std::abs(um);
                if ((tau_mid * std::conj(tau)).real() < 0.0) tau_mid = -tau_mid;
                Complex phi_next = phi_cur + step * tau_mid;
                Complex kappa_next =
                    tracker.continue_along({phi_mid, phi_next}, kappa_mid);
                S += step * (kappa_mid - kappa_bp) * tau_mid;
                // project back onto Im S = 0
                const Complex un = kappa_next - kappa_bp;
                const Complex e_perp = Complex(0, 1) * std::conj(un) / std::abs(un);
                const double corr = -S.imag() / std::abs(un);
                if (std::abs(corr) < step) {
                    phi_next += corr * e_perp;
                    kappa_next =
                        tracker.continue_along({phi_next - corr * e_perp, phi_next},
                                               kappa_next);
                    S = Complex(S.real() + (corr * (kappa_next - kappa_bp) * e_perp).real(), 0.0);
                }
                phi_cur = phi_next;
                kappa_cur = kappa_next;
                tau_prev = tau;
            } catch (const NumericalError&) {
                finite = true; // refinement pinch: effectively hit a singularity
                break;
            }
            arclen += step;
            line.points.push_back(phi_cur);
            if (branch_point_distance(phi_cur) < 2.0 * r0) {
                finite = true;
                break;
            }
        }
        line.finite = finite;
        lines.push_back(std::move(line));
    }
    return lines;
}

} // namespace adiawkb
