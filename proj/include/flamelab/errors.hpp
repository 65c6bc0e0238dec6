#pragma once

#include <stdexcept>
#include <string>

namespace flamelab {

// Bad user input: unknown option, out-of-range parameter, malformed config.
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that started from valid input failed to produce a usable
// answer (no bracket, no convergence, singular configuration, ...).
// The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Two poles on the same line merged during the height flow.
struct CollisionError : NumericalError {
    explicit CollisionError(const std::string& msg) : NumericalError(msg) {}
};

// A pole height ran away to infinity during the height flow.
struct DivergenceError : NumericalError {
    explicit DivergenceError(const std::string& msg) : NumericalError(msg) {}
};

} // namespace flamelab
