// Command-line front end: simulate | calibrate | fit | patchmap | sweep |
// rerun, driven by an INI config file. See README.md for the file formats.

#include "platesim/commands.hpp"

#include <CLI11.hpp>

#include <cstdint>

int main(int argc, char** argv) {
    CLI::App app{"Plane-parallel force apparatus twin"};
    app.require_subcommand(1);

    platesim::CliOptions options;
    std::uint64_t seed_value = 0;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* cfg = cmd->add_option("--config", options.config_path,
                                    "run configuration (INI)");
        if (config_required) cfg->required();
        cmd->add_option("--out", options.out_dir,
                        "output directory (default $PLATESIM_OUT or ./platesim_out)");
        cmd->add_option("--seed", seed_value, "override the master RNG seed")
            ->each([&](const std::string&) { options.seed = seed_value; });
    };

    auto* simulate = app.add_subcommand(
        "simulate", "integrate the driven resonator and demodulate");
    add_common(simulate, true);

    auto* calibrate = app.add_subcommand(
        "calibrate", "bias or distance electrostatic calibration");
    add_common(calibrate, true);
    calibrate->add_option("--kind", options.sweep_kind, "bias | distance")
        ->required();
    calibrate->add_option("--data", options.data_files,
                          "measured sweep CSV (otherwise synthesized)");

    auto* fit = app.add_subcommand("fit", "power-law or patch-model fit");
    add_common(fit, true);
    fit->add_option("--model", options.fit_model, "powerlaw | patch")
        ->required();
    fit->add_option("--data", options.data_files, "(d, y, sigma) CSV files")
        ->required();

    auto* patchmap = app.add_subcommand(
        "patchmap", "synthesize a patch surface and Kelvin-scan it");
    add_common(patchmap, true);

    auto* sweep = app.add_subcommand(
        "sweep", "simulate across a d0/Vg/nu_s grid into one table");
    add_common(sweep, true);

    auto* rerun = app.add_subcommand(
        "rerun", "reproduce a previous run from its manifest");
    rerun->add_option("--manifest", options.manifest_path, "manifest.json path")
        ->required();
    rerun->add_option("--out", options.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    for (auto* cmd : {simulate, calibrate, fit, patchmap, sweep, rerun}) {
        if (cmd->parsed()) {
            options.subcommand = cmd->get_name();
            break;
        }
    }
    return platesim::run_command(options);
}
