#pragma once

// Patch-potential surface maps: two-scale Gaussian random field synthesis,
// Kelvin-probe tip-averaging simulation, and map statistics.
//
// The convolution-style kernels (surface filtering, disc averaging) come in
// an OpenMP-parallel production version and a serial reference version.
// Both compute each output cell with identical arithmetic, so their results
// are bit-identical; the serial one exists as the oracle for tests and the
// baseline for the kernel benchmark.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace platesim {

struct PotentialMap {
    int rows = 0;
    int cols = 0;
    double pitch = 0.0;                  // [m] per cell
    std::array<double, 2> origin{0, 0};  // [m]
    std::vector<double> values;          // row-major, rows*cols

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const {
        return values[static_cast<std::size_t>(r) * cols + c];
    }
    double extent_x() const { return cols * pitch; }
    double extent_y() const { return rows * pitch; }

    void validate() const; // >= 8x8, pitch > 0, finite values
};

double map_mean(const PotentialMap& map);
double map_std(const PotentialMap& map);

// Two-scale random surface: sum of two independent zero-mean Gaussian random
// fields with Gaussian correlation C(r) = sigma^2 exp(-r^2 / (2 corr^2)).
struct SurfaceSpec {
    double sigma_L = 20e-3; // [V]
    double corr_L = 1e-3;   // [m]
    double sigma_S = 0.0;   // [V]
    double corr_S = 30e-6;  // [m]
    std::uint64_t rng_seed = 1;
    double extent_x = 1e-2; // [m]
    double extent_y = 1e-2; // [m]
    double pitch = 1e-5;    // [m]; must resolve corr_S (pitch <= corr_S/2)

    void validate() const; // throws std::invalid_argument
};

// Deterministic given rng_seed. The sample mean is removed (any nonzero mean
// is a contact potential, which is handled by the bias terms, not the patch
// model).
PotentialMap synthesize_surface(const SurfaceSpec& spec);
PotentialMap synthesize_surface_serial(const SurfaceSpec& spec);

// Each cell replaced by the uniform average over a disc of the given
// diameter; cells partially covered by the disc rim are weighted by the
// covered fraction, and edge cells use the in-bounds portion of the disc.
// tip_diameter == pitch reduces to the identity.
PotentialMap tip_convolve(const PotentialMap& map, double tip_diameter);
PotentialMap tip_convolve_serial(const PotentialMap& map, double tip_diameter);

struct MapStatistics {
    double sigma_L_est = 0.0; // std of the low-pass filtered map [V]
    double sigma_S_est = 0.0; // std of the residual [V]
    double mean = 0.0;        // [V]
};

// Splits the map at cutoff_lambda with a moving-average low pass;
// cutoff must lie in [2 pitch, extent/2].
MapStatistics map_statistics(const PotentialMap& map, double cutoff_lambda);

// Kelvin-probe protocol: disc average with the tip, sampled on the step
// grid. Equivalent to tip_convolve followed by subsampling, computed only at
// the scan sites.
PotentialMap kelvin_scan(const PotentialMap& map, double tip_diameter,
                         double step);

// CSV grid with a metadata header (pitch, shape, origin).
void write_map_csv(const std::filesystem::path& path, const PotentialMap& map);
PotentialMap read_map_csv(const std::filesystem::path& path);

} // namespace platesim
