#pragma once

#include <stdexcept>
#include <string>

namespace adiawkb {

// Base for every failure this library reports deliberately.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / input rejected before any numerics ran.
struct ValidationError : Error {
    using Error::Error;
};

// Generic numerical failure (integration blow-up, step underflow, ...).
struct NumericalError : Error {
    using Error::Error;
};

struct IntegrationError : NumericalError {
    using NumericalError::NumericalError;
};

// Root scan too coarse: the sign-pattern audit suspects a missed edge.
struct ResolutionError : NumericalError {
    using NumericalError::NumericalError;
};

// Evaluation requested within the edge tolerance of a band edge / branch point.
struct BranchPointProximityError : NumericalError {
    using NumericalError::NumericalError;
};

// Floquet eigenvectors degenerate (energy at a band edge).
struct DegenerateFloquetError : NumericalError {
    using NumericalError::NumericalError;
};

// Energy window of the adiabatic setup violated; message names the inequality.
struct WindowViolationError : Error {
    using Error::Error;
};

// A default straight continuation path would cross a branch cut.
struct CutCrossingError : Error {
    using Error::Error;
};

// Step refinement hit its cap without resolving a branch unambiguously.
struct RefinementLimitError : NumericalError {
    using NumericalError::NumericalError;
};

// First spectral gap closed: t1 and everything downstream undefined.
struct ClosedGapError : Error {
    using Error::Error;
};

// Denominator integral of the g-factors below threshold.
struct NearPoleError : NumericalError {
    using NumericalError::NumericalError;
};

// Gauge inconsistency detected (imaginary part of phi2 too large).
struct GaugeError : NumericalError {
    using NumericalError::NumericalError;
};

// Off-diagonal monodromy entry vanishes somewhere on the sampling grid.
struct VanishingOffdiagonalError : NumericalError {
    using NumericalError::NumericalError;
};

struct WindingAmbiguousError : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularStepError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace adiawkb
