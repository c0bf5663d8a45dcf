#include "adiawkb/actions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "adiawkb/bloch.hpp"
#include "adiawkb/errors.hpp"
#include "adiawkb/quadrature.hpp"
#include "adiawkb/quasimomentum.hpp"
#include "adiawkb/transfer.hpp"

#include "json.hpp"

namespace adiawkb {

namespace {

constexpr double delta_s = 1e-6;     // endpoint standoff, angle units
constexpr double sub_radius = 0.1;   // sqrt-substitution zone around edges
constexpr double gauge_x0 = 0.37;    // p±(x0) = 1 alignment point
constexpr double adaptive_tol = 1e-11;
constexpr double omega_tol = 1e-9;   // omega integrands cost ~ms per eval

// Integrate f over [a, b] with an endpoint singularity no worse than
// 1/sqrt at `edge` (one of a, b): substitute distance = s^2, stand off
// delta_s, and close the remaining strip with a two-term model
// f ~ alpha d^{-1/2} + beta d^{1/2} fitted at distances delta_s and
// 4 delta_s (exact for both pure powers).
template <class F>
auto integrate_edge(const F& f, double a, double b, bool edge_at_left,
                    QuadRoute route, double tol, int gl_n)
    -> std::invoke_result_t<F, double> {
    const double len = b - a;
    const double d0 = std::min(delta_s, 0.1 * len);
    const double smin = std::sqrt(d0);
    const double smax = std::sqrt(len);
    auto at_distance = [&](double d) { return edge_at_left ? a + d : b - d; };
    auto g = [&](double s) { return 2.0 * s * f(at_distance(s * s)); };
    auto inner = (route == QuadRoute::adaptive)
                     ? integrate_adaptive(g, smin, smax, tol)
                     : integrate_gl(g, smin, smax, gl_n);
    const auto f1 = f(at_distance(d0));
    const auto f4 = f(at_distance(4.0 * d0));
    return inner + d0 / 9.0 * (22.0 * f1 - 8.0 * f4);
}

template <class F>
auto integrate_plain(const F& f, double a, double b, QuadRoute route, double tol,
                     int gl_n) -> std::invoke_result_t<F, double> {
    if (route == QuadRoute::adaptive) return integrate_adaptive(f, a, b, tol);
    // two panels so the fixed route is not starved on long intervals
    const double m = 0.5 * (a + b);
    return integrate_gl(f, a, m, gl_n) + integrate_gl(f, m, b, gl_n);
}

double phi1_endpoint(const MomentumContext& ctx) {
    const BranchPoints bp = ctx.branch_points(1);
    return bp.phi1;
}

double eta2_endpoint(const MomentumContext& ctx) {
    const BandStructure& bs = ctx.bands();
    if (bs.edge_count() < 3 || !bs.gap_open(1))
        throw ClosedGapError("first spectral gap closed: t1 undefined");
    return std::acosh(bs.edge(2) - ctx.energy());
}

// Bloch pair without the public edge-proximity guard: the action integrands
// are evaluated arbitrarily close to the edges where the guarded API must
// refuse. Real cal_e classified directly; complex cal_e goes through the
// continued branch.
BlochPair pair_unguarded(const MomentumContext& ctx, Complex cal_e,
                         std::optional<double> anchor) {
    const PeriodicPotential& V = ctx.potential();
    const BandStructure& bs = ctx.bands();
    Complex k;
    if (std::abs(cal_e.imag()) < 1e-14) {
        const double e = cal_e.real();
        if (e < bs.edge(1))
            k = Complex(0.0, ctx.below_gap0_momentum_abs(e));
        else if (bs.edge_count() >= 2 && e <= bs.edge(2))
            k = Complex(ctx.band1_momentum(e), 0.0);
        else
            k = quasi_momentum(bs, V, cal_e, 0);
    } else {
        k = quasi_momentum(bs, V, cal_e, 0);
    }
    const Complex lam_p = std::exp(Complex(0, 1) * k);
    const Complex lam_m = std::exp(-Complex(0, 1) * k);
    if (std::abs(lam_p - lam_m) < 1e-150)
        throw DegenerateFloquetError("pair_unguarded: exactly at a band edge");

    const double scale =
        std::abs(cal_e) + std::abs(V.mean()) + V.oscillation_bound();
    const int nsteps = transfer_steps(scale);
    double a = anchor.value_or(0.0);
    Mat2 M = transfer_over_period(V, cal_e, nsteps, a).entries;
    if (!anchor && std::abs(M.a12) < 1e-8 * std::max(1.0, M.max_abs())) {
        a = gauge_x0;
        M = transfer_over_period(V, cal_e, nsteps, a).entries;
    }
    if (std::abs(M.a12) < 1e-13 * std::max(1.0, M.max_abs()))
        throw NumericalError("pair_unguarded: singular period-map column");
    return BlochPair(V, cal_e, k, (lam_p - M.a11) / M.a12,
                     (lam_m - M.a11) / M.a12, a, nsteps);
}

// One fundamental-matrix pass over [anchor, anchor + 1] servicing the
// quadratures over the periodic components p±.
struct PairSampler {
    const MomentumContext& ctx;
    Complex cal_e;
    double anchor;
    Complex k, m_p, m_m;
    int nsteps;

    PairSampler(const MomentumContext& c, Complex e, std::optional<double> anc)
        : ctx(c), cal_e(e), anchor(0.0) {
        const BlochPair p = pair_unguarded(c, e, anc);
        anchor = p.anchor();
        k = p.k();
        m_p = p.m_plus();
        m_m = p.m_minus();
        const double scale = std::abs(e) + std::abs(c.potential().mean()) +
                             c.potential().oscillation_bound();
        nsteps = transfer_steps(scale);
    }

    // p± at ascending xs in [anchor, anchor+1], plus value at x0 for gauge
    void sample(const std::vector<double>& xs, double x0,
                std::vector<Complex>& pp, std::vector<Complex>& pm,
                Complex& pp_x0, Complex& pm_x0) const {
        const PeriodicPotential& V = ctx.potential();
        auto q = [&](double x) { return V.eval(x); };
        const Complex E = cal_e;
        using State = std::array<Complex, 4>;
        auto rhs = [&](double x, const State& y) -> State {
            const Complex w = Complex(q(x)) - E;
            return {y[2], y[3], w * y[0], w * y[1]};
        };
        OdePath<State, decltype(rhs)> path(rhs, anchor,
                                           State{1.0, 0.0, 0.0, 1.0},
                                           1.0 / nsteps);
        // merge xs and x0 in one ascending sweep
        std::vector<double> all = xs;
        all.push_back(x0);
        std::sort(all.begin(), all.end());
        pp.resize(xs.size());
        pm.resize(xs.size());
        const Complex ik = Complex(0, 1) * k;
        std::size_t xi = 0;
        for (double x : all) {
            const State& y = path.advance_to(x);
            const Complex psi_p = y[0] + y[1] * m_p;
            const Complex psi_m = y[0] + y[1] * m_m;
            const Complex vp = std::exp(-ik * x) * psi_p;
            const Complex vm = std::exp(ik * x) * psi_m;
            if (x == x0) {
                pp_x0 = vp;
                pm_x0 = vm;
            }
            while (xi < xs.size() && xs[xi] == x) {
                pp[xi] = vp;
                pm[xi] = vm;
                ++xi;
            }
        }
    }
};

} // namespace

std::pair<Complex, Complex> g_pm(const MomentumContext& ctx, Complex cal_e,
                                 double fd_step) {
    const BandStructure& bs = ctx.bands();
    const double dist = bs.distance_to_edge(cal_e);
    if (dist < 4e-9)
        throw BranchPointProximityError("g_pm: cal_E too close to a band edge");
    const double delta =
        fd_step > 0.0 ? fd_step : std::min(1e-4, 3e-3 * dist);

    // common anchor for the finite-difference trio
    PairSampler center(ctx, cal_e, std::nullopt);
    PairSampler up(ctx, cal_e + delta, center.anchor);
    PairSampler dn(ctx, cal_e - delta, center.anchor);

    const int n_quad = 64;
    const GaussLegendreRule& rule = gauss_legendre(n_quad);
    std::vector<double> xs(n_quad);
    for (int i = 0; i < n_quad; ++i)
        xs[i] = center.anchor + 0.5 * (rule.nodes[i] + 1.0);

    const double x0 =
        center.anchor + std::fmod(gauge_x0 - center.anchor + 1.0, 1.0);

    std::vector<Complex> pc_p, pc_m, pu_p, pu_m, pd_p, pd_m;
    Complex c0p, c0m, u0p, u0m, d0p, d0m;
    center.sample(xs, x0, pc_p, pc_m, c0p, c0m);
    up.sample(xs, x0, pu_p, pu_m, u0p, u0m);
    dn.sample(xs, x0, pd_p, pd_m, d0p, d0m);

    Complex D = 0.0, Np = 0.0, Nm = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        const double w = 0.5 * rule.weights[i];
        const Complex cp = pc_p[i] / c0p, cm = pc_m[i] / c0m;
        const Complex dp_de =
            (pu_p[i] / u0p - pd_p[i] / d0p) / (2.0 * delta);
        const Complex dm_de =
            (pu_m[i] / u0m - pd_m[i] / d0m) / (2.0 * delta);
        D += w * cp * cm;
        Np += w * cm * dp_de;
        Nm += w * cp * dm_de;
    }
    if (std::abs(D) < 1e-10)
        throw NearPoleError("g_pm: |int p+ p-| below 1e-10 (near a pole of p±)");
    return {-Np / D, -Nm / D};
}

std::pair<Complex, Complex> omega_pm(const MomentumContext& ctx, Complex varphi) {
    const Complex cal_e = ctx.cal_E(varphi);
    const auto [gp, gm] = g_pm(ctx, cal_e);
    const Complex s = std::sin(varphi); // -W'(phi) with W = cos
    return {s * gp, s * gm};
}

double gauge_identity_residual(const MomentumContext& ctx, Complex varphi) {
    const auto [wp, wm] = omega_pm(ctx, varphi);
    // -d/dphi ln(k'(cal_E) w0(phi)) by central difference in phi, in the same
    // aligned gauge (w0 of the p±(x0)=1 pair).
    const double h = 1e-5;
    auto log_kw = [&](Complex phi) -> Complex {
        const Complex ce = ctx.cal_E(phi);
        PairSampler ps(ctx, ce, std::nullopt);
        std::vector<double> xs;
        std::vector<Complex> pp, pm;
        Complex p0, m0;
        const double x0 =
            ps.anchor + std::fmod(gauge_x0 - ps.anchor + 1.0, 1.0);
        ps.sample(xs, x0, pp, pm, p0, m0);
        const Complex w_aligned = (ps.m_p - ps.m_m) / (p0 * m0);
        const Complex kprime = dk_dE(ctx.bands(), ctx.potential(), ce, 0);
        return std::log(kprime * w_aligned);
    };
    const Complex lhs = wp + wm;
    const Complex rhs =
        -(log_kw(varphi + h) - log_kw(varphi - h)) / (2.0 * h);
    return std::abs(lhs - rhs);
}

// --- action integrals ---------------------------------------------------

double phase_phi1(const MomentumContext& ctx, double epsilon, QuadRoute route) {
    return phase_phi1_with_derivative(ctx, epsilon, route).first;
}

std::pair<double, double> phase_phi1_with_derivative(const MomentumContext& ctx,
                                                     double epsilon,
                                                     QuadRoute route) {
    const double p1 = phi1_endpoint(ctx);
    const double r = std::min(sub_radius, 0.45 * (pi - p1));
    auto kfun = [&](double phi) {
        return ctx.band1_momentum(ctx.energy() - std::cos(phi));
    };
    auto kpfun = [&](double phi) {
        return ctx.band1_dk_dE(ctx.energy() - std::cos(phi));
    };
    const double ik = integrate_edge(kfun, p1, p1 + r, true, route, adaptive_tol, 64) +
                      integrate_plain(kfun, p1 + r, pi, route, adaptive_tol, 64);
    const double ikp =
        integrate_edge(kpfun, p1, p1 + r, true, route, adaptive_tol, 64) +
        integrate_plain(kpfun, p1 + r, pi, route, adaptive_tol, 64);
    return {2.0 * ik / epsilon, 2.0 * ikp / epsilon};
}

double tunneling_t_exponent(const MomentumContext& ctx, double epsilon,
                            QuadRoute route) {
    const double p1 = phi1_endpoint(ctx);
    const double r = std::min(sub_radius, 0.45 * p1);
    auto f = [&](double phi) {
        return ctx.below_gap0_momentum_abs(ctx.energy() - std::cos(phi));
    };
    const double s = integrate_plain(f, 0.0, p1 - r, route, adaptive_tol, 64) +
                     integrate_edge(f, p1 - r, p1, false, route, adaptive_tol, 64);
    return -2.0 * s / epsilon;
}

double tunneling_t1_exponent(const MomentumContext& ctx, double epsilon,
                             QuadRoute route) {
    const double eta2 = eta2_endpoint(ctx);
    const double r = std::min(sub_radius, 0.45 * eta2);
    auto f = [&](double eta) {
        return pi - ctx.band1_momentum(ctx.energy() + std::cosh(eta));
    };
    const double s = integrate_plain(f, 0.0, eta2 - r, route, adaptive_tol, 64) +
                     integrate_edge(f, eta2 - r, eta2, false, route, adaptive_tol, 64);
    return -2.0 * s / epsilon;
}

Phi2Result phi2_correction(const MomentumContext& ctx, double epsilon,
                           bool reflect) {
    const double p1 = phi1_endpoint(ctx);
    const double eta2 = eta2_endpoint(ctx);
    const double rr = std::min(sub_radius, 0.45 * (pi - p1));
    const double rv = std::min(sub_radius, 0.45 * eta2);
    const double sgn = reflect ? -1.0 : 1.0; // reflected path: conjugate legs

    auto diff_real = [&](double phi) -> Complex {
        const auto [gp, gm] = g_pm(ctx, Complex(ctx.energy() - std::cos(phi)));
        const Complex s = std::sin(Complex(phi, 0.0));
        return s * (gm - gp);
    };
    // vertical leg phi = pi ± i eta contributes
    // int (omega- - omega+) dphi = ± i int sin(pi ± i eta)(g- - g+) d eta
    auto diff_vert = [&](double eta) -> Complex {
        const Complex phi(pi, sgn * eta);
        const auto [gp, gm] = g_pm(ctx, ctx.cal_E(phi));
        return Complex(0, sgn) * std::sin(phi) * (gm - gp);
    };

    const Complex A =
        integrate_edge(diff_real, p1, p1 + rr, true, QuadRoute::fixed_gl,
                       omega_tol, 32) +
        integrate_plain(diff_real, p1 + rr, pi, QuadRoute::adaptive, omega_tol, 48);
    const Complex B =
        integrate_plain(diff_vert, 0.0, eta2 - rv, QuadRoute::adaptive, omega_tol,
                        48) +
        integrate_edge(diff_vert, eta2 - rv, eta2, false, QuadRoute::fixed_gl,
                       omega_tol, 32);

    const Complex phi2 = Complex(0, 1) * epsilon / (2.0 * pi) * (A + B);
    const double imag_res = std::abs(phi2.imag());
    if (imag_res > 1e-4)
        throw GaugeError("phi2: |Im phi2| = " + std::to_string(imag_res) +
                         " exceeds 1e-4 (gauge inconsistency)");
    return {phi2.real(), imag_res};
}

PrefactorIntegrals prefactor_T(const MomentumContext& ctx) {
    const double p1 = phi1_endpoint(ctx);
    const double r = std::min(sub_radius, 0.45 * p1);
    auto wplus = [&](double phi) -> Complex {
        const auto [gp, gm] = g_pm(ctx, Complex(ctx.energy() - std::cos(phi)));
        (void)gm;
        return std::sin(phi) * gp;
    };
    auto wminus = [&](double phi) -> Complex {
        const auto [gp, gm] = g_pm(ctx, Complex(ctx.energy() - std::cos(phi)));
        (void)gp;
        return std::sin(phi) * gm;
    };
    PrefactorIntegrals out;
    out.omega_int_plus =
        integrate_plain(wplus, 0.0, p1 - r, QuadRoute::adaptive, omega_tol, 48) +
        integrate_edge(wplus, p1 - r, p1, false, QuadRoute::fixed_gl, omega_tol, 32);
    out.omega_int_minus =
        integrate_plain(wminus, 0.0, p1 - r, QuadRoute::adaptive, omega_tol, 48) +
        integrate_edge(wminus, p1 - r, p1, false, QuadRoute::fixed_gl, omega_tol, 32);
    out.T = Mat2{std::exp(out.omega_int_plus), 0.0, 0.0,
                 std::exp(-out.omega_int_minus)};
    return out;
}

ActionSet compute_actions(const MomentumContext& ctx, double epsilon,
                          double window_delta, bool with_prefactors,
                          QuadRoute route) {
    if (epsilon <= 0.0) throw ValidationError("epsilon must be positive");
    ctx.require_window(window_delta);

    ActionSet a;
    a.E = ctx.energy();
    a.epsilon = epsilon;
    a.gauge_anchor = gauge_x0;

    const auto [p1, p1prime] = phase_phi1_with_derivative(ctx, epsilon, route);
    a.phi1 = p1;
    a.phi1_prime = p1prime;
    a.ln_t = tunneling_t_exponent(ctx, epsilon, route);
    a.t = std::exp(a.ln_t);
    a.ln_t1 = tunneling_t1_exponent(ctx, epsilon, route);
    a.t1 = std::exp(a.ln_t1);
    a.has_t1 = true;

    if (with_prefactors) {
        const Phi2Result p2 = phi2_correction(ctx, epsilon);
        a.phi2 = p2.value;
        a.phi2_imag_residual = p2.imag_residual;
        const PrefactorIntegrals pre = prefactor_T(ctx);
        a.omega_int_plus = pre.omega_int_plus;
        a.omega_int_minus = pre.omega_int_minus;
        a.has_prefactors = true;
    }
    return a;
}

std::string ActionSet::to_json() const {
    nlohmann::json j;
    j["E"] = E;
    j["epsilon"] = epsilon;
    j["phi1"] = phi1;
    j["phi1_prime"] = phi1_prime;
    j["t"] = t;
    j["t1"] = t1;
    j["ln_t"] = ln_t;
    j["ln_t1"] = ln_t1;
    j["phi2"] = phi2;
    j["phi2_imag_residual"] = phi2_imag_residual;
    j["omega_int_plus"] = {omega_int_plus.real(), omega_int_plus.imag()};
    j["omega_int_minus"] = {omega_int_minus.real(), omega_int_minus.imag()};
    if (has_prefactors) {
        // condition number of the diagonal prefactor matrix
        j["prefactor_condition"] =
            std::exp(std::abs((omega_int_plus + omega_int_minus).real()));
    }
    j["gauge_anchor"] = gauge_anchor;
    j["has_prefactors"] = has_prefactors;
    return j.dump(2);
}

} // namespace adiawkb
