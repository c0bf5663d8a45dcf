#include "adiawkb/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "adiawkb/errors.hpp"

#include "json.hpp"

namespace adiawkb {

IterationResult iterate(const MatrixCocycle& c, double phi0, int n) {
    if (n < 1) throw ValidationError("iterate: need n >= 1");
    IterationResult out;
    out.log_norm_increments.reserve(n);

    // frame columns q1, q2
    Complex q1x = 1.0, q1y = 0.0, q2x = 0.0, q2y = 1.0;
    double phi = phi0 - std::floor(phi0);
    for (int i = 0; i < n; ++i) {
        const Mat2 m = c.M(phi);
        Complex y1x = m.a11 * q1x + m.a12 * q1y;
        Complex y1y = m.a21 * q1x + m.a22 * q1y;
        Complex y2x = m.a11 * q2x + m.a12 * q2y;
        Complex y2y = m.a21 * q2x + m.a22 * q2y;
        const double r11 = std::sqrt(std::norm(y1x) + std::norm(y1y));
        if (r11 < 1e-300) throw SingularStepError("iterate: frame collapsed");
        q1x = y1x / r11;
        q1y = y1y / r11;
        const Complex proj = std::conj(q1x) * y2x + std::conj(q1y) * y2y;
        y2x -= proj * q1x;
        y2y -= proj * q1y;
        const double r22 = std::sqrt(std::norm(y2x) + std::norm(y2y));
        if (r22 > 1e-14 * r11) {
            q2x = y2x / r22;
            q2y = y2y / r22;
        } else {
            // subdominant direction lost below working precision (huge
            // contraction): restart it orthogonal to q1; the top-exponent
            // stream ln r11 is untouched
            q2x = -std::conj(q1y);
            q2y = std::conj(q1x);
        }
        out.log_norm_increments.push_back(std::log(r11));
        phi += c.h;
        phi -= std::floor(phi);
    }
    out.final_frame = Mat2{q1x, q2x, q1y, q2y};
    return out;
}

LyapunovEstimate lyapunov(const MatrixCocycle& c, double phi0, int n,
                          unsigned long long seed) {
    const IterationResult it = iterate(c, phi0, n);
    const auto& inc = it.log_norm_increments;
    double mean = 0.0;
    for (double v : inc) mean += v;
    mean /= inc.size();

    // block bootstrap of the mean, block length 100
    const int block = 100;
    const int nblocks = static_cast<int>(inc.size()) / block;
    LyapunovEstimate est{mean, n, 0.0};
    if (nblocks >= 2) {
        std::vector<double> bmeans(nblocks);
        for (int b = 0; b < nblocks; ++b) {
            double s = 0.0;
            for (int j = 0; j < block; ++j) s += inc[b * block + j];
            bmeans[b] = s / block;
        }
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, nblocks - 1);
        const int resamples = 200;
        std::vector<double> rmeans(resamples);
        for (int r = 0; r < resamples; ++r) {
            double s = 0.0;
            for (int b = 0; b < nblocks; ++b) s += bmeans[pick(rng)];
            rmeans[r] = s / nblocks;
        }
        double rm = 0.0;
        for (double v : rmeans) rm += v;
        rm /= resamples;
        double var = 0.0;
        for (double v : rmeans) var += (v - rm) * (v - rm);
        est.stderr_est = std::sqrt(var / (resamples - 1));
    }
    return est;
}

RhoVSamples rho_v(const std::function<Mat2(double)>& M, double h, int grid_size) {
    if (grid_size < 4) throw ValidationError("rho_v: grid too small");
    RhoVSamples out;
    out.phi.resize(grid_size);
    out.rho.resize(grid_size);
    out.v.resize(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        const double phi = static_cast<double>(i) / grid_size;
        const Mat2 here = M(phi);
        const Mat2 back = M(phi - h);
        if (std::abs(here.a12) < 1e-12 || std::abs(back.a12) < 1e-12)
            throw VanishingOffdiagonalError(
                "rho_v: M12 vanishes on the grid (Prop. conditions need M12 != 0)");
        out.phi[i] = phi;
        out.rho[i] = here.a12 / back.a12;
        out.v[i] = here.a11 + out.rho[i] * back.a22;
    }
    return out;
}

namespace {

double arg_jump(Complex a, Complex b) { return std::arg(b / a); }

double winding_segment(const std::function<Complex(double)>& f, double x0,
                       Complex f0, double x1, Complex f1, int depth) {
    if (std::abs(f0) < 1e-12 || std::abs(f1) < 1e-12)
        throw WindingAmbiguousError("winding: sample magnitude below 1e-12");
    const double j = arg_jump(f0, f1);
    if (std::abs(j) < 0.95 * pi) return j;
    if (depth > 24)
        throw WindingAmbiguousError("winding: refinement cap exceeded");
    const double xm = 0.5 * (x0 + x1);
    const Complex fm = f(xm);
    return winding_segment(f, x0, f0, xm, fm, depth + 1) +
           winding_segment(f, xm, fm, x1, f1, depth + 1);
}

} // namespace

int winding(const std::function<Complex(double)>& f, int grid_size) {
    double total = 0.0;
    Complex prev = f(0.0);
    double xprev = 0.0;
    for (int i = 1; i <= grid_size; ++i) {
        const double x = static_cast<double>(i) / grid_size;
        const Complex cur = f(x);
        total += winding_segment(f, xprev, prev, x, cur, 0);
        prev = cur;
        xprev = x;
    }
    const double turns = total / (2.0 * pi);
    const long n = std::lround(turns);
    if (std::abs(turns - n) > 0.01)
        throw WindingAmbiguousError("winding: non-integer total increment");
    return static_cast<int>(n);
}

namespace {

// one refinement pass: golden-section sharpening of |f| extrema near the
// best grid samples
double refine_extremum(const std::function<double(double)>& f, double lo,
                       double hi, bool minimize) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 48; ++i) {
        const bool take_left = minimize ? (fc < fd) : (fc > fd);
        if (take_left) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    const double m = 0.5 * (a + b);
    return minimize ? std::min(f(m), std::min(fc, fd))
                    : std::max(f(m), std::max(fc, fd));
}

} // namespace

GapCertificate gap_certificate(const std::function<Mat2(double)>& M, double h,
                               int grid_size) {
    const RhoVSamples s = rho_v(M, h, grid_size);

    auto rho_at = [&](double phi) -> Complex {
        return M(phi).a12 / M(phi - h).a12;
    };
    auto v_at = [&](double phi) -> Complex {
        const Mat2 here = M(phi);
        return here.a11 + (here.a12 / M(phi - h).a12) * M(phi - h).a22;
    };

    GapCertificate cert;
    int i_rmin = 0, i_rmax = 0, i_vmin = 0, i_vmax = 0;
    for (int i = 0; i < grid_size; ++i) {
        if (std::abs(s.rho[i]) < std::abs(s.rho[i_rmin])) i_rmin = i;
        if (std::abs(s.rho[i]) > std::abs(s.rho[i_rmax])) i_rmax = i;
        if (std::abs(s.v[i]) < std::abs(s.v[i_vmin])) i_vmin = i;
        if (std::abs(s.v[i]) > std::abs(s.v[i_vmax])) i_vmax = i;
    }
    const double cell = 1.0 / grid_size;
    auto window_of = [&](int i) {
        return std::pair<double, double>{s.phi[i] - cell, s.phi[i] + cell};
    };
    {
        auto [lo, hi] = window_of(i_rmin);
        cert.rho_minus = refine_extremum(
            [&](double p) { return std::abs(rho_at(p)); }, lo, hi, true);
    }
    {
        auto [lo, hi] = window_of(i_rmax);
        cert.rho_plus = refine_extremum(
            [&](double p) { return std::abs(rho_at(p)); }, lo, hi, false);
    }
    {
        auto [lo, hi] = window_of(i_vmin);
        cert.v_minus = refine_extremum(
            [&](double p) { return std::abs(v_at(p)); }, lo, hi, true);
    }
    {
        auto [lo, hi] = window_of(i_vmax);
        cert.v_plus = refine_extremum(
            [&](double p) { return std::abs(v_at(p)); }, lo, hi, false);
    }

    try {
        cert.ind_rho = winding(rho_at, grid_size);
        cert.ind_v = winding(v_at, grid_size);
        cert.ind_defined = true;
    } catch (const WindingAmbiguousError&) {
        cert.ind_defined = false; // v or rho ambiguous: certificate cannot hold
    }

    const double half_v = 0.5 * cert.v_minus;
    cert.holds = cert.ind_defined && cert.ind_rho == 0 && cert.ind_v == 0 &&
                 cert.rho_minus > 0.0 && cert.rho_plus < half_v * half_v;
    if (cert.holds) {
        cert.theta_lower =
            std::log(half_v + std::sqrt(half_v * half_v - cert.rho_plus));
        const double half_vp = 0.5 * cert.v_plus;
        cert.theta_upper = std::log(
            half_vp + std::sqrt(std::max(half_vp * half_vp - cert.rho_minus, 0.0)));
    }
    return cert;
}

std::string GapCertificate::to_json() const {
    nlohmann::json j;
    j["rho_minus"] = rho_minus;
    j["rho_plus"] = rho_plus;
    j["v_minus"] = v_minus;
    j["v_plus"] = v_plus;
    j["ind_rho"] = ind_rho;
    j["ind_v"] = ind_v;
    j["ind_defined"] = ind_defined;
    j["holds"] = holds;
    j["theta_lower"] = theta_lower;
    j["theta_upper"] = theta_upper;
    return j.dump(2);
}

} // namespace adiawkb
