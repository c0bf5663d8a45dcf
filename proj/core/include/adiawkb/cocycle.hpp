#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adiawkb/types.hpp"

namespace adiawkb {

// chi(phi + h) = M(phi) chi(phi) with M 1-periodic, det M = 1 up to the
// source's tolerance. Products follow chi_{n+1} = M(phi0 + n h) chi_n.
struct MatrixCocycle {
    std::function<Mat2(double)> M;
    double h = 0.0;
};

struct IterationResult {
    std::vector<double> log_norm_increments; // ln r11 of the QR frame per step
    Mat2 final_frame;
};

// Orthonormal-frame renormalization every step; overflow-free for any length.
IterationResult iterate(const MatrixCocycle& c, double phi0, int n);

struct LyapunovEstimate {
    double value = 0.0;  // per-step exponent (= h Re theta for Bloch cocycles)
    int n_steps = 0;
    double stderr_est = 0.0; // block bootstrap, block length 100
};

LyapunovEstimate lyapunov(const MatrixCocycle& c, double phi0, int n,
                          unsigned long long seed = 7);

struct RhoVSamples {
    std::vector<double> phi;
    std::vector<Complex> rho; // M12(phi) / M12(phi - h)
    std::vector<Complex> v;   // M11(phi) + rho(phi) M22(phi - h)
};

RhoVSamples rho_v(const std::function<Mat2(double)>& M, double h, int grid_size);

// Argument increment over one period divided by 2 pi, with automatic local
// grid refinement where adjacent-phase jumps approach pi.
int winding(const std::function<Complex(double)>& f, int grid_size);

// Monotonous-Bloch-solution certificate: when it holds, the energy is in the
// resolvent set and the per-step growth exponent lies in
// [theta_lower, theta_upper].
struct GapCertificate {
    double rho_minus = 0.0, rho_plus = 0.0;
    double v_minus = 0.0, v_plus = 0.0;
    int ind_rho = 0, ind_v = 0;
    bool ind_defined = false;
    bool holds = false;
    double theta_lower = 0.0, theta_upper = 0.0;

    std::string to_json() const;
};

GapCertificate gap_certificate(const std::function<Mat2(double)>& M, double h,
                               int grid_size = 4096);

} // namespace adiawkb
