#include "adiawkb/potential.hpp"

#include <cmath>

#include "adiawkb/errors.hpp"
#include "adiawkb/types.hpp"

#include "json.hpp"

namespace adiawkb {

PeriodicPotential::PeriodicPotential(std::vector<double> cosine_coeffs,
                                     std::vector<double> sine_coeffs)
    : cos_(std::move(cosine_coeffs)), sin_(std::move(sine_coeffs)) {
    const int deg = degree();
    if (deg > max_degree)
        throw ValidationError("potential degree " + std::to_string(deg) +
                              " exceeds cap " + std::to_string(max_degree));
    for (double c : cos_)
        if (!std::isfinite(c)) throw ValidationError("non-finite cosine coefficient");
    for (double s : sin_)
        if (!std::isfinite(s)) throw ValidationError("non-finite sine coefficient");
}

PeriodicPotential PeriodicPotential::cosine(double amplitude) {
    return PeriodicPotential({0.0, amplitude}, {});
}

double PeriodicPotential::eval(double x) const {
    double v = cos_.empty() ? 0.0 : cos_[0];
    const double w = 2.0 * pi * x;
    for (std::size_t j = 1; j < cos_.size(); ++j)
        if (cos_[j] != 0.0) v += cos_[j] * std::cos(w * static_cast<double>(j));
    for (std::size_t j = 0; j < sin_.size(); ++j)
        if (sin_[j] != 0.0) v += sin_[j] * std::sin(w * static_cast<double>(j + 1));
    return v;
}

int PeriodicPotential::degree() const {
    int deg = 0;
    for (std::size_t j = 1; j < cos_.size(); ++j)
        if (cos_[j] != 0.0) deg = static_cast<int>(j);
    for (std::size_t j = 0; j < sin_.size(); ++j)
        if (sin_[j] != 0.0) deg = std::max(deg, static_cast<int>(j + 1));
    return deg;
}

bool PeriodicPotential::is_zero() const {
    for (double c : cos_)
        if (c != 0.0) return false;
    for (double s : sin_)
        if (s != 0.0) return false;
    return true;
}

double PeriodicPotential::oscillation_bound() const {
    double b = 0.0;
    for (std::size_t j = 1; j < cos_.size(); ++j) b += std::abs(cos_[j]);
    for (double s : sin_) b += std::abs(s);
    return b;
}

std::string PeriodicPotential::to_json() const {
    nlohmann::json j;
    j["cosine_coeffs"] = cos_;
    j["sine_coeffs"] = sin_;
    return j.dump();
}

PeriodicPotential PeriodicPotential::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<double> c, s;
    if (j.contains("cosine_coeffs")) c = j["cosine_coeffs"].get<std::vector<double>>();
    if (j.contains("sine_coeffs")) s = j["sine_coeffs"].get<std::vector<double>>();
    return PeriodicPotential(std::move(c), std::move(s));
}

} // namespace adiawkb
