#pragma once

#include <stdexcept>
#include <string>

namespace bihar {

// Base for every failure the library reports on purpose.  The CLI maps
// ValidationError to exit code 1 and the numerical ones to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ShapeError : ValidationError {
    using ValidationError::ValidationError;
};

struct ParameterError : ValidationError {
    using ValidationError::ValidationError;
};

struct ExtentError : ValidationError {
    using ValidationError::ValidationError;
};

struct GaugeDomainError : ValidationError {
    using ValidationError::ValidationError;
};

struct NumericalError : Error {
    using Error::Error;
};

struct SingularSymbolError : NumericalError {
    using NumericalError::NumericalError;
};

struct SolverError : NumericalError {
    using NumericalError::NumericalError;
};

struct IllConditionedError : NumericalError {
    using NumericalError::NumericalError;
};

struct InconsistencyError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace bihar
