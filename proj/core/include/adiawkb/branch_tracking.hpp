#pragma once

#include <functional>
#include <vector>

#include "adiawkb/types.hpp"

namespace adiawkb {

// Continuation of a branch of k(z) = arccos(Delta(z)/2) along a polyline in
// the complex z plane. At each point the candidate set is {±arccos + 2 pi m};
// the branch is followed by nearest-candidate selection with automatic step
// bisection. A step is accepted only when the chosen candidate is both within
// `hop_guard` of the previous value and clearly separated from the runner-up,
// which prevents silent branch hops near (but off) branch points.
class BranchTracker {
  public:
    // max_step caps the geometric stride: without it a step spanning a full
    // 2 pi period of Delta(z) can close up on the wrong sheet unnoticed.
    BranchTracker(std::function<Complex(Complex)> delta_of_z,
                  double hop_guard = 0.2, int max_depth = 60,
                  double max_step = 0.2)
        : delta_(std::move(delta_of_z)), guard_(hop_guard), depth_cap_(max_depth),
          max_step_(max_step) {}

    // value of the tracked branch after walking the polyline; `start` must be
    // a valid branch value at polyline.front().
    Complex continue_along(const std::vector<Complex>& polyline, Complex start,
                           std::vector<std::pair<Complex, Complex>>* trace = nullptr) const;

    // candidates of arccos(Delta/2) closest / second closest to `near`
    struct Candidates {
        Complex best;
        double best_dist;
        double second_dist;
    };
    Candidates candidates_at(Complex z, Complex near) const;

  private:
    Complex step(Complex z0, Complex k0, Complex z1, int depth,
                 std::vector<std::pair<Complex, Complex>>* trace) const;

    std::function<Complex(Complex)> delta_;
    double guard_;
    int depth_cap_;
    double max_step_;
};

} // namespace adiawkb
