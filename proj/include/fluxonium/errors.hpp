// errors.hpp: exception types shared by all modules.

#pragma once

#include <stdexcept>
#include <string>

namespace fluxonium {

/// Invalid input: bad parameters, out-of-domain arguments, malformed files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-convergence, singular systems, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fluxonium
