#include "adiawkb/band.hpp"

#include <algorithm>
#include <cmath>

#include "adiawkb/errors.hpp"
#include "adiawkb/transfer.hpp"

namespace adiawkb {

bool BandStructure::gap_open(int n, double tol) const {
    return gap_upper(n) - gap_lower(n) > tol;
}

std::optional<BandLocation> BandStructure::locate(double E) const {
    if (edges_.empty()) return std::nullopt;
    if (E < edges_.front().energy) return BandLocation{false, 0};
    if (E > covered_) return std::nullopt;
    // position = number of edges strictly below E
    std::size_t pos = 0;
    while (pos < edges_.size() && edges_[pos].energy < E) ++pos;
    if (pos < edges_.size() && edges_[pos].energy == E) {
        // exactly at an edge: count it as the adjacent band
        const int n = static_cast<int>(pos) / 2 + 1;
        return BandLocation{true, n};
    }
    if (pos == edges_.size() && (pos % 2 == 1))
        return BandLocation{true, static_cast<int>(pos + 1) / 2};
    if (pos == edges_.size())
        return BandLocation{false, static_cast<int>(pos) / 2};
    if (pos % 2 == 1) return BandLocation{true, static_cast<int>(pos + 1) / 2};
    return BandLocation{false, static_cast<int>(pos) / 2};
}

double BandStructure::distance_to_edge(double E) const {
    double d = std::numeric_limits<double>::infinity();
    for (const BandEdge& e : edges_) d = std::min(d, std::abs(E - e.energy));
    return d;
}

double BandStructure::distance_to_edge(Complex E) const {
    double d = std::numeric_limits<double>::infinity();
    for (const BandEdge& e : edges_) d = std::min(d, std::abs(E - e.energy));
    return d;
}

namespace {

struct DiscCache {
    const PeriodicPotential& V;
    int nsteps;

    double operator()(double E) const {
        auto q = [&](double x) { return V.eval(x); };
        const auto y = propagate<double>(q, E, 0.0, 1.0, nsteps);
        return y[0] + y[3];
    }

    double derivative(double E) const {
        return discriminant_with_derivative(V, Complex(E), nsteps).dvalue.real();
    }
};

double bisect_root(const DiscCache& f, double target, double a, double b,
                   double fa, double fb) {
    // plain bisection to 1e-12, then one Newton polish
    double lo = a, hi = b, flo = fa - target, fhi = fb - target;
    (void)fhi;
    for (int i = 0; i < 80 && hi - lo > 1e-12; ++i) {
        const double m = 0.5 * (lo + hi);
        const double fm = f(m) - target;
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    double root = 0.5 * (lo + hi);
    const double dp = f.derivative(root);
    if (std::abs(dp) > 1e-12) {
        const double step = (f(root) - target) / dp;
        if (std::abs(step) < (b - a)) root -= step;
    }
    return root;
}

// Newton on Delta' to land on a tangency candidate (double root of Delta -+ 2).
double refine_extremum(const DiscCache& f, double a, double b) {
    double x = 0.5 * (a + b);
    for (int i = 0; i < 60; ++i) {
        const auto d = discriminant_with_derivative(f.V, Complex(x), f.nsteps);
        const double d1 = d.dvalue.real();
        // second derivative by central difference of Delta'
        const double h = std::max(1e-6, 1e-8 * std::abs(x));
        const double d2 =
            (discriminant_with_derivative(f.V, Complex(x + h), f.nsteps).dvalue.real() -
             discriminant_with_derivative(f.V, Complex(x - h), f.nsteps).dvalue.real()) /
            (2.0 * h);
        if (std::abs(d2) < 1e-14) break;
        const double step = d1 / d2;
        x -= step;
        x = std::clamp(x, a, b);
        if (std::abs(step) < 1e-12) break;
    }
    return x;
}

} // namespace

BandStructure band_edges(const PeriodicPotential& V, double e_max,
                         int scan_intervals) {
    const double scale = std::abs(e_max) + std::abs(V.mean()) + V.oscillation_bound();
    const int nsteps = transfer_steps(scale);
    const DiscCache disc{V, nsteps};

    double e_lo = V.mean() - V.oscillation_bound() - 0.5;
    for (int guard = 0; guard < 50 && disc(e_lo) <= 2.0; ++guard) e_lo -= 1.0;
    if (disc(e_lo) <= 2.0)
        throw ResolutionError("band_edges: could not find energy below the spectrum");
    if (e_max <= e_lo)
        throw ValidationError("band_edges: e_max below the spectrum start");

    const int n = std::max(scan_intervals, 64);
    const double h = (e_max - e_lo) / n;
    std::vector<double> es(n + 1), ds(n + 1);
    for (int i = 0; i <= n; ++i) {
        es[i] = e_lo + i * h;
        ds[i] = disc(es[i]);
    }

    struct Root {
        double e;
        double target;
        bool degenerate;
    };
    std::vector<Root> roots;

    for (const double target : {2.0, -2.0}) {
        for (int i = 0; i < n; ++i) {
            const double fa = ds[i] - target, fb = ds[i + 1] - target;
            if (fa == 0.0) {
                roots.push_back({es[i], target, false});
                continue;
            }
            if ((fa < 0.0) != (fb < 0.0))
                roots.push_back(
                    {bisect_root(disc, target, es[i], es[i + 1], ds[i], ds[i + 1]),
                     target, false});
        }
        // tangency pass: local minima of |Delta - target| without sign change
        for (int i = 1; i < n; ++i) {
            const double fm = ds[i] - target;
            const double fl = ds[i - 1] - target, fr = ds[i + 1] - target;
            if ((fl < 0.0) != (fm < 0.0) || (fm < 0.0) != (fr < 0.0)) continue;
            if (std::abs(fm) >= std::min(std::abs(fl), std::abs(fr))) continue;
            if (std::abs(fm) > 0.05) continue;
            const double ex = refine_extremum(disc, es[i - 1], es[i + 1]);
            const double fx = disc(ex) - target;
            if (std::abs(fx) < 1e-9) {
                roots.push_back({ex, target, true});
                roots.push_back({ex, target, true});
            } else if ((fx < 0.0) != (fm < 0.0) || (fx < 0.0) != (fl < 0.0)) {
                // narrow open gap the grid stepped over: two simple roots
                roots.push_back({bisect_root(disc, target, es[i - 1], ex,
                                             disc(es[i - 1]), disc(ex)),
                                 target, false});
                roots.push_back(
                    {bisect_root(disc, target, ex, es[i + 1], disc(ex), disc(es[i + 1])),
                     target, false});
            }
        }
    }

    std::sort(roots.begin(), roots.end(),
              [](const Root& a, const Root& b) { return a.e < b.e; });
    // merge duplicates found by both passes (keep degenerate pairs intact)
    std::vector<Root> merged;
    for (const Root& r : roots) {
        if (!merged.empty() && !r.degenerate && !merged.back().degenerate &&
            std::abs(r.e - merged.back().e) < 1e-10 &&
            r.target == merged.back().target)
            continue;
        merged.push_back(r);
    }

    // interlacing + sign-pattern audit
    std::vector<BandEdge> edges;
    for (std::size_t j = 0; j < merged.size(); ++j) {
        const double expected = ((j + 1) / 2) % 2 == 0 ? 2.0 : -2.0;
        if (merged[j].target != expected)
            throw ResolutionError(
                "band_edges: interlacing violated near E = " +
                std::to_string(merged[j].e) + " (suspected missed root)");
        edges.push_back({merged[j].e, j % 2 == 0, merged[j].degenerate});
    }
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
        if (edges[j + 1].energy - edges[j].energy < 1e-9) continue;
        const double mid = 0.5 * (edges[j].energy + edges[j + 1].energy);
        const double dm = std::abs(disc(mid));
        const bool expect_band = j % 2 == 0;
        if (expect_band ? dm > 2.0 + 1e-9 : dm < 2.0 - 1e-9)
            throw ResolutionError("band_edges: midpoint audit failed near E = " +
                                  std::to_string(mid));
    }

    BandStructure bs(std::move(edges));
    bs.set_covered(e_max);
    return bs;
}

} // namespace adiawkb
