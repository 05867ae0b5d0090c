#pragma once

#include <stdexcept>
#include <string>

namespace argap {

// Base class of every failure this library reports by exception.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A filter (or root set) violates the strict unit-circle stability requirement.
struct NotStable : Error {
    using Error::Error;
};

// The polynomial root solver did not converge.
struct RootFindingFailure : Error {
    using Error::Error;
};

// A prediction-error distance was requested with an unstable generating
// filter; the spectral integral diverges in that case.
struct UnstableGenerator : Error {
    using Error::Error;
};

// A rejection sampler exhausted its proposal budget.
struct RejectionBudgetExceeded : Error {
    using Error::Error;
};

// Requested cluster count is outside [1, n].
struct InvalidM : Error {
    using Error::Error;
};

// A weighted least-squares system stayed singular after regularization.
struct SingularSystem : Error {
    using Error::Error;
};

// Two curves (or other paired sequences) have different lengths.
struct LengthMismatch : Error {
    using Error::Error;
};

// Malformed input file; message carries a line number where applicable.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace argap
