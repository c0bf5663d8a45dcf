#include "adiawkb/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "adiawkb/errors.hpp"
#include "adiawkb/monodromy.hpp"
#include "adiawkb/parallel.hpp"
#include "adiawkb/transfer.hpp"

#include "json.hpp"

namespace adiawkb {

EnergyWindow energy_window(const BandStructure& bs, double delta) {
    if (bs.edge_count() < 3)
        throw ValidationError("energy_window: band structure must cover E3");
    const double e1 = bs.edge(1), e2 = bs.edge(2), e3 = bs.edge(3);
    if (!(e2 < e3))
        throw WindowViolationError("energy_window: first gap closed (E2 = E3)");
    EnergyWindow w;
    w.delta = delta;
    w.lo = e1 - 1.0 + delta;
    w.hi = std::min(e1 + 1.0 - delta, e2 - 1.0 - delta);
    return w;
}

std::vector<std::pair<int, double>> find_quantization_energies(
    const PeriodicPotential& V, const BandStructure& bs, double epsilon,
    double delta) {
    const EnergyWindow w = energy_window(bs, delta);
    if (w.empty())
        throw WindowViolationError("find_quantization_energies: empty window");

    const double inset = 1e-9 * std::max(1.0, std::abs(w.hi));
    const double a = w.lo + inset, b = w.hi - inset;

    auto phi1_at = [&](double E) {
        MomentumContext ctx(V, bs, E);
        return phase_phi1_with_derivative(ctx, epsilon);
    };
    const auto [fa, fa_p] = phi1_at(a);
    const auto [fb, fb_p] = phi1_at(b);
    (void)fa_p;
    (void)fb_p;
    if (!(fb > fa))
        throw NumericalError(
            "find_quantization_energies: phi1 not increasing over the window "
            "(contradicts the phi1' > 0 identity)");

    const int l_min = static_cast<int>(std::ceil((fa - pi / 2.0) / pi));
    const int l_max = static_cast<int>(std::floor((fb - pi / 2.0) / pi));

    std::vector<std::pair<int, double>> roots;
    for (int l = std::max(l_min, 0); l <= l_max; ++l) {
        const double target = pi / 2.0 + pi * l;
        double lo = a, hi = b, flo = fa - target, fhi = fb - target;
        if (flo > 0.0 || fhi < 0.0)
            throw NumericalError("find_quantization_energies: lost bracket");
        double E = 0.5 * (lo + hi);
        for (int it = 0; it < 80; ++it) {
            const auto [f, fp] = phi1_at(E);
            const double g = f - target;
            if (g <= 0.0) {
                lo = E;
                flo = g;
            } else {
                hi = E;
                fhi = g;
            }
            double next = E - g / fp; // Newton, phi1' > 0 on the window
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - E) < 1e-12) {
                E = next;
                break;
            }
            E = next;
        }
        (void)flo;
        (void)fhi;
        roots.push_back({l, E});
    }
    return roots;
}

SpectralPrediction predicted_intervals(
    const std::vector<std::pair<int, double>>& roots,
    const std::vector<ActionSet>& actions, const EnergyWindow& window) {
    if (roots.size() != actions.size())
        throw ValidationError("predicted_intervals: roots/actions size mismatch");
    SpectralPrediction out;
    out.window_lo = window.lo;
    out.window_hi = window.hi;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const ActionSet& a = actions[i];
        PredictionEntry e;
        e.l = roots[i].first;
        e.center = roots[i].second;
        e.t = a.t;
        e.t1 = a.t1;
        e.phi1_prime = a.phi1_prime;
        // resolvent criterion |cos phi1| <= t + t1 expanded around the root
        e.width = 2.0 * (a.t + a.t1) / std::abs(a.phi1_prime);
        e.lo = e.center - 0.5 * e.width;
        e.hi = e.center + 0.5 * e.width;
        e.lambda_l = std::exp(a.ln_t1 - a.ln_t);
        e.F_l = std::cos(a.phi1) / a.t;
        out.epsilon = a.epsilon;
        out.entries.push_back(e);
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const PredictionEntry& x, const PredictionEntry& y) {
                  return x.center < y.center;
              });
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * i / (n - 1.0);
    return g;
}

std::vector<double> default_phases(int count, int q) {
    std::vector<double> p(count);
    const double span = 1.0 / q;
    for (int i = 0; i < count; ++i) p[i] = span * i / count;
    return p;
}

namespace {

// all roots of |Delta_L| = 2 on the grid (both targets), then band intervals
std::vector<std::pair<double, double>> bands_one_phase(
    const PeriodicPotential& V, const Approximant& ap, double phase,
    const std::vector<double>& e_grid) {
    const double eps = ap.epsilon();
    const int L = ap.period();
    const double scale = std::abs(e_grid.back()) + std::abs(V.mean()) +
                         V.oscillation_bound() + 1.0;
    const int per_unit = std::max(96, static_cast<int>(24.0 * std::sqrt(scale)));
    const int nsteps = L * per_unit;

    auto q = [&](double x) { return V.eval(x - phase) + std::cos(eps * x); };
    auto disc = [&](double E) {
        const auto y = propagate<double>(q, E, 0.0, static_cast<double>(L), nsteps);
        return y[0] + y[3];
    };

    const int n = static_cast<int>(e_grid.size());
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = disc(e_grid[i]);

    std::vector<double> roots;
    for (const double target : {2.0, -2.0}) {
        for (int i = 0; i + 1 < n; ++i) {
            double fa = d[i] - target, fb = d[i + 1] - target;
            if (fa == 0.0) {
                roots.push_back(e_grid[i]);
                continue;
            }
            if ((fa < 0.0) == (fb < 0.0)) continue;
            double lo = e_grid[i], hi = e_grid[i + 1];
            for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
                const double m = 0.5 * (lo + hi);
                const double fm = disc(m) - target;
                if ((fa < 0.0) == (fm < 0.0)) {
                    lo = m;
                    fa = fm;
                } else {
                    hi = m;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
    }
    std::sort(roots.begin(), roots.end());

    std::vector<std::pair<double, double>> bands;
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        const double mid = 0.5 * (roots[i] + roots[i + 1]);
        if (std::abs(disc(mid)) <= 2.0) {
            if (!bands.empty() && roots[i] <= bands.back().second + 1e-13)
                bands.back().second = roots[i + 1];
            else
                bands.push_back({roots[i], roots[i + 1]});
        }
    }
    return bands;
}

std::vector<std::pair<double, double>> merge_intervals(
    std::vector<std::pair<double, double>> v) {
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& iv : v) {
        if (!out.empty() && iv.first <= out.back().second)
            out.back().second = std::max(out.back().second, iv.second);
        else
            out.push_back(iv);
    }
    return out;
}

} // namespace

OracleSpectrum oracle_spectrum(const PeriodicPotential& V, const Approximant& ap,
                               const std::vector<double>& phases,
                               const std::vector<double>& e_grid) {
    if (ap.N <= 0 || ap.q <= 0 || ap.p < 0 || ap.p >= ap.q * ap.N)
        throw ValidationError("oracle_spectrum: bad approximant");
    if (std::gcd(ap.p, ap.q) != 1 && ap.p != 0)
        throw ValidationError("oracle_spectrum: p/q not in lowest terms");
    if (e_grid.size() < 8)
        throw ValidationError("oracle_spectrum: energy grid too small");

    OracleSpectrum out;
    out.approximant = ap;
    out.phases = phases;

    std::vector<std::vector<std::pair<double, double>>> per_phase(phases.size());
    parallel_for(static_cast<int>(phases.size()), [&](int i) {
        per_phase[i] = bands_one_phase(V, ap, phases[i], e_grid);
    });
    std::vector<std::pair<double, double>> all;
    for (auto& b : per_phase) all.insert(all.end(), b.begin(), b.end());
    out.bands = merge_intervals(std::move(all));
    return out;
}

double OracleSpectrum::total_measure() const {
    double m = 0.0;
    for (const auto& b : bands) m += b.second - b.first;
    return m;
}

std::vector<GapScanEntry> gap_scan(const PeriodicPotential& V,
                                   const BandStructure& bs, double epsilon,
                                   double delta, const std::vector<double>& e_grid,
                                   int cert_grid) {
    std::vector<GapScanEntry> out(e_grid.size());
    const double h = std::fmod(2.0 * pi / epsilon, 1.0);
    parallel_for(static_cast<int>(e_grid.size()), [&](int i) {
        const double E = e_grid[i];
        MomentumContext ctx(V, bs, E);
        const ActionSet a =
            compute_actions(ctx, epsilon, delta, /*with_prefactors=*/false);
        const MonodromyModel m = assemble_model(a);
        out[i].E = E;
        out[i].cert =
            gap_certificate([&m](double phi) { return m.eval(phi); }, h, cert_grid);
    });
    return out;
}

ComparisonReport compare(const SpectralPrediction& prediction,
                         const OracleSpectrum& oracle, double margin) {
    ComparisonReport rep;
    rep.margin = margin;

    // oracle bands clipped to the prediction window
    std::vector<std::pair<double, double>> clipped;
    for (const auto& b : oracle.bands) {
        const double lo = std::max(b.first, prediction.window_lo);
        const double hi = std::min(b.second, prediction.window_hi);
        if (hi > lo) clipped.push_back({lo, hi});
    }
    for (const auto& b : clipped) rep.total_band_measure += b.second - b.first;
    if (clipped.empty() || rep.total_band_measure <= 0.0) {
        rep.inconclusive = true;
        return rep;
    }

    std::vector<std::pair<double, double>> widened;
    for (const auto& e : prediction.entries)
        widened.push_back({e.lo - margin, e.hi + margin});
    widened = [&] {
        std::sort(widened.begin(), widened.end());
        std::vector<std::pair<double, double>> out;
        for (const auto& iv : widened) {
            if (!out.empty() && iv.first <= out.back().second)
                out.back().second = std::max(out.back().second, iv.second);
            else
                out.push_back(iv);
        }
        return out;
    }();

    for (const auto& b : clipped) {
        for (const auto& w : widened) {
            const double lo = std::max(b.first, w.first);
            const double hi = std::min(b.second, w.second);
            if (hi > lo) rep.contained_measure += hi - lo;
        }
    }
    rep.containment_fraction = rep.contained_measure / rep.total_band_measure;

    // spacing statistics of consecutive centers
    if (prediction.entries.size() >= 2) {
        rep.spacing_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < prediction.entries.size(); ++i) {
            const double d = prediction.entries[i + 1].center -
                             prediction.entries[i].center;
            rep.spacing_min = std::min(rep.spacing_min, d);
            rep.spacing_max = std::max(rep.spacing_max, d);
        }
        rep.spacing_ratio = rep.spacing_max / rep.spacing_min;
        rep.c1 = rep.spacing_min / prediction.epsilon;
        rep.c2 = rep.spacing_max / prediction.epsilon;
    }

    // per-center distance to the nearest oracle band, in epsilon units
    for (const auto& e : prediction.entries) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& b : oracle.bands) {
            if (e.center >= b.first && e.center <= b.second) {
                d = 0.0;
                break;
            }
            d = std::min(d, std::min(std::abs(e.center - b.first),
                                     std::abs(e.center - b.second)));
        }
        rep.center_offsets_eps.push_back(d / prediction.epsilon);
    }
    return rep;
}

std::string SpectralPrediction::to_json() const {
    nlohmann::json j;
    j["window"] = {window_lo, window_hi};
    j["epsilon"] = epsilon;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je;
        je["l"] = e.l;
        je["center"] = e.center;
        je["interval"] = {e.lo, e.hi};
        je["width"] = e.width;
        je["lambda_l"] = e.lambda_l;
        je["F_l"] = e.F_l;
        je["t"] = e.t;
        je["t1"] = e.t1;
        je["phi1_prime"] = e.phi1_prime;
        arr.push_back(je);
    }
    j["entries"] = arr;
    return j.dump(2);
}

std::string OracleSpectrum::to_json() const {
    nlohmann::json j;
    j["N"] = approximant.N;
    j["p"] = approximant.p;
    j["q"] = approximant.q;
    j["period"] = approximant.period();
    j["epsilon"] = approximant.epsilon();
    j["phases"] = phases;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : bands) arr.push_back({b.first, b.second});
    j["bands"] = arr;
    j["total_measure"] = total_measure();
    return j.dump(2);
}

std::string ComparisonReport::to_json() const {
    nlohmann::json j;
    j["inconclusive"] = inconclusive;
    j["total_band_measure"] = total_band_measure;
    j["contained_measure"] = contained_measure;
    j["containment_fraction"] = containment_fraction;
    j["margin"] = margin;
    j["spacing_min"] = spacing_min;
    j["spacing_max"] = spacing_max;
    j["spacing_ratio"] = spacing_ratio;
    j["c1"] = c1;
    j["c2"] = c2;
    j["center_offsets_eps"] = center_offsets_eps;
    return j.dump(2);
}

} // namespace adiawkb
