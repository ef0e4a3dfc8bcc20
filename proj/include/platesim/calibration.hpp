#pragma once

// Electrostatic calibration workflows: residual-bias extraction from a bias
// sweep, absolute-distance determination from the 1/d^3 response, and
// effective-stiffness inference.

#include "platesim/config.hpp"
#include "platesim/fitting.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace platesim {

struct BiasPoint {
    double Vg;        // applied bias [V]
    double amplitude; // demodulated amplitude [m]
    double sigma;     // amplitude uncertainty [m]; 0 -> unit weight
};

struct BiasSweep {
    std::vector<BiasPoint> points;
    double d0 = 0.0; // fixed separation during the sweep [m]

    // >= 5 points and at least one point on each side of the amplitude
    // minimum; throws fit_error otherwise.
    void validate() const;
};

struct BiasFitResult {
    double V0 = 0.0;       // residual bias [V]
    double sigma_V0 = 0.0; // from the fit covariance [V]
    double curvature = 0.0; // parabola quadratic coefficient [m/V^2]
    double chi2_reduced = 0.0;
    std::array<double, 9> covariance{}; // parabola (c0, c1, c2), row-major
};

// Weighted least-squares parabola amplitude(Vg); the vertex abscissa is -V0.
// A non-convex fit (curvature <= 0) throws fit_error("no amplitude minimum
// in range").
BiasFitResult fit_residual_bias(const BiasSweep& sweep);

struct DistancePoint {
    double z_pzt;     // commanded source displacement [m]
    double amplitude; // [m]
    double sigma;     // [m]
};

struct DistanceSweep {
    std::vector<DistancePoint> points;
    double Vg = 0.0; // fixed bias during the sweep [V]

    void validate() const; // >= 5 points, strictly monotone z
};

struct DistanceFitResult {
    double d_r = 0.0;        // reference distance [m]
    double sigma_dr = 0.0;   // [m]
    double coeff_A = 0.0;    // fitted amplitude coefficient [m^4]
    double coeff_ratio = 0.0; // fitted / expected coefficient
    double chi2_reduced = 0.0;
    FitResult fit;
};

// Fits amplitude = A / (d_r + z)^3 over (A, d_r); the expected coefficient is
// eps0 S V_eff^2 xs0 / stiffness. Throws fit_error on divergence or when the
// fitted d_r implies plate contact within the sweep range.
DistanceFitResult fit_reference_distance(const DistanceSweep& sweep,
                                         double stiffness_N_m, double xs0,
                                         double V_eff, double area_S);

// k = eps0 S V^2 xs0 / (A_V d0^3); exact algebraic inverse of the
// electrostatic small-signal amplitude.
double infer_stiffness(double A_V, double V_eff, double d0, double xs0,
                       double area_S);

// Desk-level sweep synthesis: the quasi-static analytic amplitude plus
// complex Gaussian phasor noise with per-quadrature sigma =
// ASD * day_factor / sqrt(T). This models a demodulated measurement of
// duration_per_point seconds without the full time-domain pipeline. The
// finite-frequency transfer gain is a common factor across all points of a
// sweep and cancels in both calibration fits, so it is not applied here.
BiasSweep synthesize_bias_sweep(const ApparatusConfig& cfg,
                                const std::vector<double>& vg_values,
                                double duration_per_point, std::uint64_t seed);

DistanceSweep synthesize_distance_sweep(const ApparatusConfig& cfg, double d_r,
                                        const std::vector<double>& z_values,
                                        double duration_per_point,
                                        std::uint64_t seed);

struct V0DistanceCheck {
    double d0 = 0.0;
    double V0 = 0.0;
    double sigma_V0 = 0.0;
};

// Repeats the bias calibration at several separations. V0 is modeled as
// distance-independent, so this is a consistency check, not part of the
// default workflow.
std::vector<V0DistanceCheck> check_v0_vs_distance(
    const ApparatusConfig& cfg, const std::vector<double>& distances,
    const std::vector<double>& vg_values, double duration_per_point,
    std::uint64_t seed);

} // namespace platesim
