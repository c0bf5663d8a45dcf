#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace adiawkb {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// 2x2 complex matrix, row major. Small enough that value semantics win.
struct Mat2 {
    Complex a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};

    static Mat2 identity() { return {}; }

    Complex det() const { return a11 * a22 - a12 * a21; }
    Complex trace() const { return a11 + a22; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }

    std::array<Complex, 2> apply(const std::array<Complex, 2>& v) const {
        return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]};
    }

    Mat2 inverse() const {
        const Complex d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }
};

inline Mat2 operator*(const Complex& s, const Mat2& m) {
    return {s * m.a11, s * m.a12, s * m.a21, s * m.a22};
}

inline double frobenius_distance(const Mat2& a, const Mat2& b) {
    return std::sqrt(std::norm(a.a11 - b.a11) + std::norm(a.a12 - b.a12) +
                     std::norm(a.a21 - b.a21) + std::norm(a.a22 - b.a22));
}

} // namespace adiawkb
