#include "adiawkb/branch_tracking.hpp"

#include <cmath>

#include "adiawkb/errors.hpp"

namespace adiawkb {

BranchTracker::Candidates BranchTracker::candidates_at(Complex z, Complex near) const {
    const Complex c = std::acos(delta_(z) / 2.0);
    Complex best{};
    double bd = std::numeric_limits<double>::infinity();
    double sd = bd;
    for (const double sign : {1.0, -1.0}) {
        const Complex base = sign * c;
        const double m0 = std::round((near.real() - base.real()) / (2.0 * pi));
        for (double m : {m0 - 1.0, m0, m0 + 1.0}) {
            const Complex cand = base + 2.0 * pi * m;
            const double d = std::abs(cand - near);
            if (d < bd) {
                // previous best may coincide with the new one (c real: +c and
                // -c + 2 pi m can collide); keep distinct runner-up only
                if (std::abs(cand - best) > 1e-12) sd = bd;
                bd = d;
                best = cand;
            } else if (d < sd && std::abs(cand - best) > 1e-12) {
                sd = d;
            }
        }
    }
    return {best, bd, sd};
}

Complex BranchTracker::step(Complex z0, Complex k0, Complex z1, int depth,
                            std::vector<std::pair<Complex, Complex>>* trace) const {
    if (std::abs(z1 - z0) <= max_step_) {
        const Candidates c = candidates_at(z1, k0);
        const bool separated = c.second_dist > 3.0 * c.best_dist + 1e-12;
        if (c.best_dist <= guard_ && separated) {
            if (trace) trace->push_back({z1, c.best});
            return c.best;
        }
    }
    if (depth >= depth_cap_)
        throw RefinementLimitError(
            "branch continuation: refinement cap hit near z = (" +
            std::to_string(z1.real()) + ", " + std::to_string(z1.imag()) +
            "); unexpected singularity or path through a branch point");
    const Complex mid = 0.5 * (z0 + z1);
    const Complex km = step(z0, k0, mid, depth + 1, trace);
    return step(mid, km, z1, depth + 1, trace);
}

Complex BranchTracker::continue_along(
    const std::vector<Complex>& polyline, Complex start,
    std::vector<std::pair<Complex, Complex>>* trace) const {
    if (polyline.empty()) throw ValidationError("continuation path is empty");
    const Candidates c0 = candidates_at(polyline.front(), start);
    if (c0.best_dist > 1e-6)
        throw NumericalError("continuation start value is not a branch value");
    Complex k = c0.best;
    if (trace) trace->push_back({polyline.front(), k});
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        if (std::abs(polyline[i + 1] - polyline[i]) < 1e-15) continue;
        k = step(polyline[i], k, polyline[i + 1], 0, trace);
    }
    return k;
}

} // namespace adiawkb
