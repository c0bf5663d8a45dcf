#pragma once

#include <string>
#include <vector>

namespace adiawkb {

// Real 1-periodic potential as a finite trigonometric series,
//
//   V(x) = sum_j a_j cos(2 pi j x) + sum_{j>=1} b_j sin(2 pi j x),
//
// a_j = cosine_coeffs[j], b_j = sine_coeffs[j-1]. Periodicity and realness
// hold by construction; the degree is capped so configs stay honest.
class PeriodicPotential {
  public:
    static constexpr int max_degree = 32;

    PeriodicPotential() = default;
    PeriodicPotential(std::vector<double> cosine_coeffs,
                      std::vector<double> sine_coeffs);

    static PeriodicPotential zero() { return PeriodicPotential(); }
    // V(x) = cos(2 pi x)
    static PeriodicPotential cosine(double amplitude = 1.0);

    double eval(double x) const;

    const std::vector<double>& cosine_coeffs() const { return cos_; }
    const std::vector<double>& sine_coeffs() const { return sin_; }

    int degree() const;
    bool is_zero() const;

    // sum |a_j| + |b_j| over j >= 1; bound for |V - a_0|.
    double oscillation_bound() const;
    double mean() const { return cos_.empty() ? 0.0 : cos_[0]; }

    // Serialization: {"cosine_coeffs": [...], "sine_coeffs": [...]}.
    std::string to_json() const;
    static PeriodicPotential from_json(const std::string& text);

  private:
    std::vector<double> cos_; // a_0 .. a_K
    std::vector<double> sin_; // b_1 .. b_K
};

} // namespace adiawkb
