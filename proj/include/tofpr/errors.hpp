// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tofpr {

/// A diagonal weight retained by the measurement system fell below the
/// conditioning floor; inverting it would amplify noise without bound.
class IllConditionedSystem : public std::runtime_error {
public:
    IllConditionedSystem(const std::string& what, int offending_ell)
        : std::runtime_error(what), ell(offending_ell) {}
    int ell;
};

/// The data cannot be explained by the requested number of exponential
/// components (too few samples, or a degenerate null space).
class ModelOrderMismatch : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Component delays are too close for a stable amplitude fit.
class NearDegenerateModel : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The estimated spectrum violates the structure of an autocorrelation
/// (negative or complex constant term, unpairable components).
class InconsistentSpectrum : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter set with the wrong number of cross terms was passed to a
/// fixed-arity solver.
class WrongArity : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical output contradicts a structural guarantee of the model
/// (e.g. a nominally real solution carries a large imaginary residue).
class DataInconsistency : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed run configuration or scene description.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File I/O failure; the message carries the offending path.
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tofpr
