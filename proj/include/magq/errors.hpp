#pragma once

#include <stdexcept>
#include <string>

namespace magq {

// Error taxonomy shared by the library and the CLI exit-code contract:
//   ParamError        -> exit 2 (bad input / config)
//   StabilityError,
//   ConvergenceError  -> exit 3 (numerical domain failures)
//   NotFoundError, AmbiguityError,
//   SingularityError, InsufficientSpanError -> exit 4

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamError : Error {
    using Error::Error;
};

// Ground-state stability domain violated (named inequality in message).
struct StabilityError : Error {
    using Error::Error;
};

// Reported quantity failed the cutoff-doubling convergence rule.
struct ConvergenceError : Error {
    using Error::Error;
};

struct NotFoundError : Error {
    using Error::Error;
};

struct AmbiguityError : Error {
    using Error::Error;
};

// Vanishing energy denominator in a perturbative sum (factor named in message).
struct SingularityError : Error {
    using Error::Error;
};

struct InsufficientSpanError : Error {
    using Error::Error;
};

} // namespace magq
