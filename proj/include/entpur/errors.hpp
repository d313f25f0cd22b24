#pragma once

#include <stdexcept>

namespace entpur {

/// Parameter outside its documented domain (probabilities, fidelities, weights).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Operands whose qubit counts or matrix dimensions do not match.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Qubit index out of range, or repeated where distinct indices are required.
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Matrix expected to be unitary fails the max-norm check against I.
struct NotUnitary : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Post-selection on an outcome of numerically zero probability.
struct ZeroProbability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bisection bracket endpoints do not straddle the feature being located.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace entpur
