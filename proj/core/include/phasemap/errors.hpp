#pragma once

#include <stdexcept>
#include <string>

namespace phasemap {

/// A caller broke an operation's precondition (wrong frame, bad support...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Parameters that can never describe a valid run.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The integrator produced non-finite amplitudes.
class IntegrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Both quadrature estimators are buried in sampling noise.
class IndeterminatePhase : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An output file could not be written.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace phasemap
