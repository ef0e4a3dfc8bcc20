#pragma once

// Fundamental physical constants (SI, CODATA 2018). Fixed values, not
// configurable at runtime.

#include <numbers>

namespace platesim {

struct PhysicalConstants {
    double hbar;  // reduced Planck constant [J s]
    double c;     // speed of light [m/s]
    double eps0;  // vacuum permittivity [F/m]
    double kB;    // Boltzmann constant [J/K]
};

inline constexpr PhysicalConstants kConstants{
    1.054571817e-34,
    299792458.0,
    8.8541878128e-12,
    1.380649e-23,
};

static_assert(kConstants.hbar > 0.0 && kConstants.c > 0.0 &&
              kConstants.eps0 > 0.0 && kConstants.kB > 0.0);

inline constexpr double kPi = std::numbers::pi;

} // namespace platesim
