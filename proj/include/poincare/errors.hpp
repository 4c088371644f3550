#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace poincare {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateCurve : public Error {
public:
    using Error::Error;
};

class TooCloseToBoundary : public Error {
public:
    using Error::Error;
};

class InvalidOrder : public Error {
public:
    using Error::Error;
};

/// A required moment condition on the boundary data does not hold.
/// `condition` is the stable identifier used in diagnostics and CLI output
/// (e.g. "Eq. 9"); `residual` is the value of the violated integral.
class SolvabilityViolated : public Error {
public:
    SolvabilityViolated(std::string condition, double residual)
        : Error(condition + " moment = " + std::to_string(residual)),
          condition_(std::move(condition)),
          residual_(residual) {}

    const std::string& condition() const { return condition_; }
    double residual() const { return residual_; }

private:
    std::string condition_;
    double residual_;
};

class MomentViolation : public Error {
public:
    using Error::Error;
};

class NotNormal : public Error {
public:
    using Error::Error;
};

class PhaseResolutionExceeded : public Error {
public:
    using Error::Error;
};

class NotElliptic : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class StencilCrossesBoundary : public Error {
public:
    using Error::Error;
};

class InvalidProblem : public Error {
public:
    using Error::Error;
};

}  // namespace poincare
