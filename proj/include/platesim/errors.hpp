#pragma once

#include <stdexcept>

namespace platesim {

// Configuration / input-file problems. CLI maps these to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time-domain integration failures (instability, non-finite state). Exit 3.
struct integration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fit failures (degenerate normal equations, no convergent start,
// invalid sweep). Exit 4.
struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace platesim
