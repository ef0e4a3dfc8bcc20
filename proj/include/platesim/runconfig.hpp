#pragma once

// Full run configuration for the command-line tool: the apparatus sections
// plus force-model selection, run timing, sweep grids, calibration sweep
// layouts, and surface/Kelvin-scan settings. Parsing is strict: unknown
// sections or keys are hard errors.

#include "platesim/config.hpp"
#include "platesim/forces.hpp"
#include "platesim/patchmap.hpp"

#include <memory>
#include <string>
#include <vector>

namespace platesim {

struct ModelConfig {
    std::string type = "casimir"; // casimir|electrostatic|powerlaw|patch|sum
    double powerlaw_C = 1e-27;    // [N m^n]
    double powerlaw_n = 4.0;
    PatchParams patch;
    std::vector<std::string> sum_components; // for type = sum
};

struct RunSection {
    double duration = 60.0;      // [s]
    double sample_rate = 4000.0; // [Hz]
};

struct SweepSection {
    std::string axis = "d0"; // d0|vg|nu_s
    std::vector<double> values;
    double duration = 100.0; // [s] per point
};

struct BiasSweepSection {
    double vg_min = -0.5; // [V]
    double vg_max = 0.5;
    int points = 11;
    double duration = 100.0; // [s] per point
    // optional V0-vs-distance consistency check; empty = off
    std::vector<double> check_distances;
};

struct DistanceSweepSection {
    double z_min = 0.0; // [m]
    double z_max = 7e-6;
    int points = 10;
    double d_r = 3e-6;       // true reference distance for synthesis [m]
    double duration = 100.0; // [s] per point
};

struct KelvinSection {
    double tip_diameter = 2e-3; // [m]
    double step = 317.5e-6;     // [m]
};

struct RunConfig {
    ApparatusConfig apparatus;
    ModelConfig model;
    RunSection run;
    SweepSection sweep;
    BiasSweepSection bias;
    DistanceSweepSection distance;
    SurfaceSpec surface;
    KelvinSection kelvin;
};

RunConfig parse_run_config(const std::string& text);
std::string serialize_run_config(const RunConfig& cfg);

// Builds the configured force model. Electrostatic components use the net
// gap voltage Vg + V0.
std::shared_ptr<const ForceModel> build_force_model(const RunConfig& cfg);
std::shared_ptr<const ForceModel> build_force_model(const RunConfig& cfg,
                                                    const GapState& gap);

// FNV-1a 64-bit content hash, hex-encoded; identifies configs in manifests.
std::string fnv1a_hex(const std::string& text);

} // namespace platesim
