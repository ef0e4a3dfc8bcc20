// Benchmark of the OpenMP kernels against their serial references:
// surface synthesis, tip convolution, and a desk-level Monte Carlo
// calibration study. Prints wall times, speedup, and the max |difference|
// between the parallel and serial results (expected to be exactly 0).

#include "platesim/calibration.hpp"
#include "platesim/patchmap.hpp"
#include "platesim/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

double max_abs_diff(const platesim::PotentialMap& a,
                    const platesim::PotentialMap& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both paths run serially\n");
#endif

    using namespace platesim;

    SurfaceSpec spec;
    spec.sigma_L = 20e-3;
    spec.corr_L = 1e-3;
    spec.sigma_S = 50e-3;
    spec.corr_S = 40e-6;
    spec.extent_x = 8e-3;
    spec.extent_y = 8e-3;
    spec.pitch = 1e-5;
    spec.rng_seed = 42;

    double t0 = now_ms();
    const PotentialMap serial_map = synthesize_surface_serial(spec);
    double t1 = now_ms();
    const PotentialMap parallel_map = synthesize_surface(spec);
    double t2 = now_ms();
    std::printf("synthesize_surface %dx%d: serial %.1f ms, omp %.1f ms, "
                "speedup %.2fx, max|diff| %.3g\n",
                serial_map.rows, serial_map.cols, t1 - t0, t2 - t1,
                (t1 - t0) / std::max(1e-9, t2 - t1),
                max_abs_diff(serial_map, parallel_map));

    const double tip = 1.2e-3;
    t0 = now_ms();
    const PotentialMap conv_serial = tip_convolve_serial(serial_map, tip);
    t1 = now_ms();
    const PotentialMap conv_parallel = tip_convolve(serial_map, tip);
    t2 = now_ms();
    std::printf("tip_convolve (tip %.1f mm): serial %.1f ms, omp %.1f ms, "
                "speedup %.2fx, max|diff| %.3g\n",
                tip * 1e3, t1 - t0, t2 - t1,
                (t1 - t0) / std::max(1e-9, t2 - t1),
                max_abs_diff(conv_serial, conv_parallel));

    // Monte Carlo bias-calibration study, parallel over seeds.
    ApparatusConfig cfg;
    std::vector<double> vg;
    for (int i = 0; i < 11; ++i) vg.push_back(-0.5 + 0.1 * i);
    const int n_seeds = 400;
    std::vector<double> v0(n_seeds);

    t0 = now_ms();
    for (int s = 0; s < n_seeds; ++s) {
        const BiasSweep sweep = synthesize_bias_sweep(
            cfg, vg, 100.0, derive_seed(7, "bench-bias", s));
        v0[s] = fit_residual_bias(sweep).V0;
    }
    t1 = now_ms();
    std::vector<double> v0p(n_seeds);
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n_seeds; ++s) {
        const BiasSweep sweep = synthesize_bias_sweep(
            cfg, vg, 100.0, derive_seed(7, "bench-bias", s));
        v0p[s] = fit_residual_bias(sweep).V0;
    }
    t2 = now_ms();
    double max_diff = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        max_diff = std::max(max_diff, std::abs(v0[s] - v0p[s]));
    }
    std::printf("bias Monte Carlo (%d seeds): serial %.1f ms, omp %.1f ms, "
                "speedup %.2fx, max|diff| %.3g\n",
                n_seeds, t1 - t0, t2 - t1,
                (t1 - t0) / std::max(1e-9, t2 - t1), max_diff);
    return 0;
}
