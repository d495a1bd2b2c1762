#pragma once

#include <stdexcept>
#include <string>

namespace phasescat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (nonpositive radius, odd node count, a >= b ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Measurement arc fails the disk-radius criterion k*R < j_{0,1}.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// Evaluation outside the domain of a function or field (x = z, point inside the obstacle ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Linear system singular to working precision.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double rcond) : Error(what), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// Modal series did not converge within the allowed number of terms.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Phaseless data violates an analytic constraint or is degenerate.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace phasescat
