#pragma once

// Subcommand implementations behind the CLI front end. Each command returns
// a process exit code: 0 success, 2 configuration/parse error, 3 simulation
// failure, 4 fit failure. Every run writes a manifest that embeds the
// resolved configuration, so a manifest re-run reproduces the outputs
// bit-exactly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace platesim {

struct CliOptions {
    std::string subcommand; // simulate|calibrate|fit|patchmap|sweep|rerun
    std::string config_path;
    std::string out_dir;          // empty -> $PLATESIM_OUT or ./platesim_out
    std::optional<std::uint64_t> seed;
    std::vector<std::string> data_files;
    std::string sweep_kind; // calibrate: bias|distance
    std::string fit_model;  // fit: powerlaw|patch
    std::string manifest_path; // rerun
};

int run_command(const CliOptions& options);

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSimulation = 3;
inline constexpr int kExitFit = 4;

} // namespace platesim
