#pragma once

#include <stdexcept>
#include <string>

namespace willmore {

// Precondition violations: bad radius, c = 0, bounds outside a profile, ...
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The numerics gave up: integrator stalled, bisection lost its bracket,
// Picard iteration diverged, root scan exhausted.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace willmore
