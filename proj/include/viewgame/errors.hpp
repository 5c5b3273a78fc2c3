#pragma once

#include <stdexcept>
#include <string>

namespace viewgame {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A model hypothesis or operation precondition does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The trend gate never closes (gamma_th <= lambda_pu), so the viewing window is unbounded.
class InfiniteHorizonError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Root bracketing failed: f(a) and f(b) have the same sign.
class NoSignChangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed run configuration (CLI maps this to exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace viewgame
