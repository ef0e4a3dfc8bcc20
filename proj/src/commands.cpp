#include "platesim/commands.hpp"

#include "platesim/calibration.hpp"
#include "platesim/csv.hpp"
#include "platesim/dynamics.hpp"
#include "platesim/errors.hpp"
#include "platesim/fitting.hpp"
#include "platesim/patchmap.hpp"
#include "platesim/readout.hpp"
#include "platesim/rng.hpp"
#include "platesim/runconfig.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace platesim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write file: " + path.string());
    out << content;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

fs::path resolve_out_dir(const CliOptions& options) {
    std::string dir = options.out_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("PLATESIM_OUT")) dir = env;
    }
    if (dir.empty()) dir = "platesim_out";
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

struct RunContext {
    std::string config_text;
    RunConfig cfg;
    std::uint64_t seed;
    bool seed_overridden = false;
    fs::path out;
};

void write_manifest(const RunContext& ctx, const CliOptions& options,
                    const std::vector<std::string>& outputs) {
    json m;
    m["tool"] = "platesim";
    m["version"] = kVersion;
    m["subcommand"] = options.subcommand;
    m["timestamp"] = timestamp_utc();
    m["seed"] = ctx.seed;
    m["seed_overridden"] = ctx.seed_overridden;
    m["config_path"] = options.config_path;
    m["config_fnv64"] = fnv1a_hex(ctx.config_text);
    m["config_text"] = ctx.config_text;
    if (!options.sweep_kind.empty()) m["sweep_kind"] = options.sweep_kind;
    if (!options.fit_model.empty()) m["fit_model"] = options.fit_model;
    json files = json::array();
    for (const auto& f : options.data_files) {
        files.push_back({{"path", f}, {"fnv64", fnv1a_hex(read_file(f))}});
    }
    m["data_files"] = files;
    m["outputs"] = outputs;
    write_file(ctx.out / "manifest.json", m.dump(2) + "\n");
}

RunContext make_context(const CliOptions& options) {
    RunContext ctx;
    if (options.config_path.empty()) {
        throw config_error("--config is required");
    }
    ctx.config_text = read_file(options.config_path);
    ctx.cfg = parse_run_config(ctx.config_text);
    const ValidationReport report = validate_config(ctx.cfg.apparatus);
    if (!report.ok()) {
        std::string msg = "invalid apparatus configuration:";
        for (const auto& v : report.violations) msg += "\n  " + v;
        throw config_error(msg);
    }
    for (const auto& w : report.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    ctx.seed = options.seed.value_or(ctx.cfg.apparatus.noise.rng_seed);
    ctx.seed_overridden = options.seed.has_value();
    ctx.out = resolve_out_dir(options);
    return ctx;
}

struct SimulatedPoint {
    Phasor phasor;
    TimeSeries displacement;
};

// One end-to-end simulated measurement: integrate the driven oscillator,
// add displacement-equivalent noise, demodulate at the source frequency.
SimulatedPoint simulate_point(const RunConfig& cfg,
                              std::shared_ptr<const ForceModel> model,
                              const GapState& gap, double duration,
                              std::uint64_t noise_seed) {
    const ResonatorParams& res = cfg.apparatus.resonator;
    const double t_settle = settle_time(res);
    const double needed = t_settle + 10.0 / gap.freq_s;
    if (duration < needed) {
        throw config_error(
            "run.duration_s: too short for transient settling plus 10 "
            "modulation periods (need >= " + format_double(needed) + " s)");
    }
    DriveSpec drive;
    drive.gap = gap;
    drive.model = std::move(model);
    drive.duration = duration;
    drive.sample_rate = cfg.run.sample_rate;

    TimeSeries x = integrate_motion(drive, res);
    NoiseSpec noise = cfg.apparatus.noise;
    noise.rng_seed = noise_seed;
    x = add_noise(x, noise);

    SimulatedPoint out;
    out.phasor = demodulate(x, gap.freq_s, t_settle);
    out.displacement = std::move(x);
    return out;
}

int cmd_simulate(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const RunConfig& cfg = ctx.cfg;
    if (!(cfg.run.duration > 0.0)) {
        throw config_error("run.duration_s: must be positive");
    }

    auto model = build_force_model(cfg);
    SimulatedPoint point =
        simulate_point(cfg, model, cfg.apparatus.gap, cfg.run.duration,
                       derive_seed(ctx.seed, "simulate-noise"));

    // The interferometer is fringe-locked at the mean working point, so the
    // voltage record carries only the deviation from the mean displacement.
    TimeSeries centered = point.displacement;
    const double mean = [&] {
        double s = 0.0;
        for (double v : centered.samples) s += v;
        return s / static_cast<double>(centered.samples.size());
    }();
    for (double& v : centered.samples) v -= mean;
    TimeSeries volts = displacement_to_voltage(centered, cfg.apparatus.readout);

    write_timeseries_csv(ctx.out / "displacement.csv", point.displacement);
    write_timeseries_csv(ctx.out / "voltage.csv", volts);

    CsvTable phasor;
    phasor.header = {"freq_hz", "amplitude_m", "phase_rad", "sigma_amplitude_m"};
    phasor.rows = {{point.phasor.freq, point.phasor.amplitude,
                    point.phasor.phase, point.phasor.sigma_amplitude}};
    write_csv(ctx.out / "phasor.csv", phasor);

    write_manifest(ctx, options,
                   {"displacement.csv", "voltage.csv", "phasor.csv"});
    std::cout << "amplitude_m=" << format_double(point.phasor.amplitude)
              << " phase_rad=" << format_double(point.phasor.phase)
              << " sigma_m=" << format_double(point.phasor.sigma_amplitude)
              << "\n";
    return kExitOk;
}

int cmd_sweep(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const RunConfig& cfg = ctx.cfg;
    const std::string& axis = cfg.sweep.axis;
    if (axis != "d0" && axis != "vg" && axis != "nu_s") {
        throw config_error("sweep.axis: must be d0, vg or nu_s");
    }
    if (cfg.sweep.values.empty()) {
        throw config_error("sweep.values: grid must not be empty");
    }

    // Validate every grid point before running any of them.
    std::vector<GapState> gaps;
    for (double v : cfg.sweep.values) {
        GapState gap = cfg.apparatus.gap;
        if (axis == "d0") gap.d0 = v;
        if (axis == "vg") gap.Vg = v;
        if (axis == "nu_s") gap.freq_s = v;
        ApparatusConfig check = cfg.apparatus;
        check.gap = gap;
        const ValidationReport rep = validate_config(check);
        if (!rep.ok()) {
            std::string msg = "sweep point " + format_double(v) + " invalid:";
            for (const auto& violation : rep.violations) msg += "\n  " + violation;
            throw config_error(msg);
        }
        gaps.push_back(gap);
    }

    const auto n = static_cast<long long>(gaps.size());
    std::vector<Phasor> phasors(gaps.size());
    std::vector<std::string> errors(gaps.size());

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        try {
            auto model = build_force_model(cfg, gaps[i]);
            phasors[i] = simulate_point(
                             cfg, model, gaps[i], cfg.sweep.duration,
                             derive_seed(ctx.seed, "sweep-point",
                                         static_cast<std::uint64_t>(i)))
                             .phasor;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (long long i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            throw integration_error("sweep point " +
                                    format_double(cfg.sweep.values[i]) + ": " +
                                    errors[i]);
        }
    }

    CsvTable table;
    const std::string axis_col =
        axis == "d0" ? "d0_m" : (axis == "vg" ? "vg_V" : "nu_s_hz");
    table.header = {axis_col, "amplitude_m", "phase_rad", "sigma_m"};
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        table.rows.push_back({cfg.sweep.values[i], phasors[i].amplitude,
                              phasors[i].phase, phasors[i].sigma_amplitude});
    }
    write_csv(ctx.out / "sweep.csv", table);
    write_manifest(ctx, options, {"sweep.csv"});
    std::cout << "sweep points: " << gaps.size() << "\n";
    return kExitOk;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(n - 1));
    }
    return out;
}

json covariance_json(const FitResult& fit) {
    const std::size_t p = fit.params.size();
    json cov = json::array();
    for (std::size_t a = 0; a < p; ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < p; ++b) {
            row.push_back(fit.covariance[a * p + b]);
        }
        cov.push_back(row);
    }
    return cov;
}

int cmd_calibrate(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const RunConfig& cfg = ctx.cfg;
    const std::string kind = options.sweep_kind;
    if (kind != "bias" && kind != "distance") {
        throw config_error("calibrate needs --kind bias or --kind distance");
    }

    json report;
    report["kind"] = kind;
    if (kind == "bias") {
        BiasSweep sweep;
        if (!options.data_files.empty()) {
            const CsvTable t = read_csv(options.data_files.front());
            const int cv = t.column("vg_V");
            const int ca = t.column("amplitude_m");
            const int cs = t.column("sigma_m");
            if (cv < 0 || ca < 0) {
                throw config_error(
                    "bias sweep file needs vg_V and amplitude_m columns");
            }
            for (const auto& row : t.rows) {
                sweep.points.push_back(
                    {row[cv], row[ca], cs >= 0 ? row[cs] : 0.0});
            }
            sweep.d0 = cfg.apparatus.gap.d0;
        } else {
            sweep = synthesize_bias_sweep(
                cfg.apparatus,
                linspace(cfg.bias.vg_min, cfg.bias.vg_max, cfg.bias.points),
                cfg.bias.duration, derive_seed(ctx.seed, "calibrate-bias"));
        }
        const BiasFitResult fit = fit_residual_bias(sweep);
        report["V0_V"] = fit.V0;
        report["sigma_V0_V"] = fit.sigma_V0;
        report["curvature_m_per_V2"] = fit.curvature;
        report["chi2_reduced"] = fit.chi2_reduced;
        // Casimir-predicted floor at this gap, for checking that the
        // electrostatic signal dominates the sweep.
        const CasimirForce casimir(cfg.apparatus.plate.area_S);
        report["casimir_floor_m"] = analytic_amplitude(
            casimir, cfg.apparatus.gap, cfg.apparatus.resonator);
        json cov = json::array();
        for (int a = 0; a < 3; ++a) {
            json row = json::array();
            for (int b = 0; b < 3; ++b) row.push_back(fit.covariance[a * 3 + b]);
            cov.push_back(row);
        }
        report["covariance"] = cov;
        json pts = json::array();
        for (const auto& p : sweep.points) {
            pts.push_back({{"vg_V", p.Vg},
                           {"amplitude_m", p.amplitude},
                           {"sigma_m", p.sigma}});
        }
        report["points"] = pts;
        if (!cfg.bias.check_distances.empty()) {
            const auto checks = check_v0_vs_distance(
                cfg.apparatus, cfg.bias.check_distances,
                linspace(cfg.bias.vg_min, cfg.bias.vg_max, cfg.bias.points),
                cfg.bias.duration, derive_seed(ctx.seed, "calibrate-v0-check"));
            json rows = json::array();
            for (const auto& c : checks) {
                rows.push_back({{"d0_m", c.d0},
                                {"V0_V", c.V0},
                                {"sigma_V0_V", c.sigma_V0}});
            }
            report["v0_vs_distance"] = rows;
        }
        std::cout << "V0_V=" << format_double(fit.V0)
                  << " sigma_V0_V=" << format_double(fit.sigma_V0) << "\n";
    } else {
        DistanceSweep sweep;
        if (!options.data_files.empty()) {
            const CsvTable t = read_csv(options.data_files.front());
            const int cz = t.column("z_pzt_m");
            const int ca = t.column("amplitude_m");
            const int cs = t.column("sigma_m");
            if (cz < 0 || ca < 0) {
                throw config_error(
                    "distance sweep file needs z_pzt_m and amplitude_m columns");
            }
            for (const auto& row : t.rows) {
                sweep.points.push_back(
                    {row[cz], row[ca], cs >= 0 ? row[cs] : 0.0});
            }
            sweep.Vg = cfg.apparatus.gap.Vg;
        } else {
            sweep = synthesize_distance_sweep(
                cfg.apparatus, cfg.distance.d_r,
                linspace(cfg.distance.z_min, cfg.distance.z_max,
                         cfg.distance.points),
                cfg.distance.duration,
                derive_seed(ctx.seed, "calibrate-distance"));
        }
        const double v_eff = cfg.apparatus.gap.Vg + cfg.apparatus.gap.V0;
        const DistanceFitResult fit = fit_reference_distance(
            sweep, stiffness(cfg.apparatus.resonator), cfg.apparatus.gap.xs0,
            v_eff, cfg.apparatus.plate.area_S);
        report["d_r_m"] = fit.d_r;
        report["sigma_dr_m"] = fit.sigma_dr;
        report["coeff_A_m4"] = fit.coeff_A;
        report["coeff_ratio"] = fit.coeff_ratio;
        report["chi2_reduced"] = fit.chi2_reduced;
        report["covariance"] = covariance_json(fit.fit);
        json pts = json::array();
        for (const auto& p : sweep.points) {
            pts.push_back({{"z_pzt_m", p.z_pzt},
                           {"amplitude_m", p.amplitude},
                           {"sigma_m", p.sigma}});
        }
        report["points"] = pts;
        std::cout << "d_r_m=" << format_double(fit.d_r)
                  << " sigma_dr_m=" << format_double(fit.sigma_dr) << "\n";
    }
    write_file(ctx.out / "calibration.json", report.dump(2) + "\n");
    write_manifest(ctx, options, {"calibration.json"});
    return kExitOk;
}

struct NamedData {
    std::string file;
    FitData data;
    bool amplitude_units = false; // sweep-table schema (meters, not N/m)
};

std::vector<NamedData> load_fit_data(const std::vector<std::string>& files) {
    if (files.empty()) {
        throw config_error("fit needs at least one --data file");
    }
    std::vector<NamedData> out;
    for (const auto& f : files) {
        const CsvTable t = read_csv(f);
        NamedData nd;
        int cd = t.column("d_m");
        int cy = t.column("y");
        int cs = t.column("sigma");
        if (cd < 0 && cy < 0) { // sweep-table schema
            cd = t.column("d0_m");
            cy = t.column("amplitude_m");
            cs = t.column("sigma_m");
            nd.amplitude_units = true;
        }
        if (cd < 0 || cy < 0) {
            throw config_error(
                f + ": need (d_m, y[, sigma]) or sweep (d0_m, amplitude_m, "
                    "sigma_m) columns");
        }
        nd.file = f;
        for (const auto& row : t.rows) {
            nd.data.x.push_back(row[cd]);
            nd.data.y.push_back(row[cy]);
            nd.data.sigma.push_back(cs >= 0 ? row[cs] : 0.0);
        }
        if (nd.data.x.empty()) {
            throw config_error(f + ": no data rows");
        }
        out.push_back(std::move(nd));
    }
    return out;
}

int cmd_fit(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const RunConfig& cfg = ctx.cfg;
    const std::string kind = options.fit_model;
    if (kind != "powerlaw" && kind != "patch") {
        throw config_error("fit needs --model powerlaw or --model patch");
    }
    std::vector<NamedData> sets = load_fit_data(options.data_files);

    // The patch model is a force-derivative magnitude in N/m. Sweep tables
    // carry displacement amplitudes, so convert them with the configured
    // stiffness: |dF/dd| = amplitude * k / (xs0 * |gain(nu_s)|). Power-law
    // fits are unit-agnostic (only A rescales).
    if (kind == "patch") {
        const double k = stiffness(cfg.apparatus.resonator);
        const double gain = std::abs(transfer_gain(cfg.apparatus.resonator,
                                                   cfg.apparatus.gap.freq_s));
        const double scale = k / (cfg.apparatus.gap.xs0 * gain);
        for (auto& nd : sets) {
            if (!nd.amplitude_units) continue;
            for (double& y : nd.data.y) y *= scale;
            for (double& s : nd.data.sigma) s *= scale;
        }
    }

    FitData merged;
    for (const auto& nd : sets) {
        merged.x.insert(merged.x.end(), nd.data.x.begin(), nd.data.x.end());
        merged.y.insert(merged.y.end(), nd.data.y.begin(), nd.data.y.end());
        merged.sigma.insert(merged.sigma.end(), nd.data.sigma.begin(),
                            nd.data.sigma.end());
    }

    json report;
    report["model"] = kind;
    FitResult fit;
    const double lateral_L = cfg.apparatus.plate.lateral_L;
    const double lambda_max = cfg.model.patch.lambda_max;
    if (kind == "powerlaw") {
        fit = fit_power_law(merged);
        report["A"] = fit.params[0];
        report["n"] = fit.params[1];
        report["sigma_A"] = fit.param_sigma(0);
        report["sigma_n"] = fit.param_sigma(1);
    } else {
        fit = fit_patch_model(merged, lateral_L, lambda_max);
        report["sigma_S_V"] = fit.params[0];
        report["sigma_L_V"] = fit.params[1];
        report["lambda_min_m"] = fit.params[2];
        report["sigma_sigma_S_V"] = fit.param_sigma(0);
        report["sigma_sigma_L_V"] = fit.param_sigma(1);
        report["sigma_lambda_min_m"] = fit.param_sigma(2);
        report["lambda_max_m"] = lambda_max;
        // lambda_max is held fixed; refits at half/double show how little
        // the data constrain it.
        json sens = json::array();
        for (double factor : {0.5, 2.0}) {
            try {
                const FitResult alt =
                    fit_patch_model(merged, lateral_L, lambda_max * factor);
                sens.push_back({{"lambda_max_m", lambda_max * factor},
                                {"sigma_S_V", alt.params[0]},
                                {"sigma_L_V", alt.params[1]},
                                {"lambda_min_m", alt.params[2]},
                                {"chi2_reduced", alt.chi2_reduced}});
            } catch (const fit_error&) {
                sens.push_back({{"lambda_max_m", lambda_max * factor},
                                {"failed", true}});
            }
        }
        report["lambda_max_sensitivity"] = sens;
    }
    report["chi2_reduced"] = fit.chi2_reduced;
    report["converged"] = fit.converged;
    report["n_iterations"] = fit.n_iterations;
    report["covariance"] = covariance_json(fit);
    report["chi2_trace"] = fit.chi2_trace;

    json datasets = json::array();
    for (const auto& nd : sets) {
        json residuals = json::array();
        for (std::size_t i = 0; i < nd.data.x.size(); ++i) {
            double model_y = 0.0;
            if (kind == "powerlaw") {
                model_y = fit.params[0] * std::pow(nd.data.x[i], -fit.params[1]);
            } else {
                model_y = patch_derivative_magnitude(nd.data.x[i], fit.params,
                                                     lateral_L, lambda_max);
            }
            residuals.push_back({{"d_m", nd.data.x[i]},
                                 {"y", nd.data.y[i]},
                                 {"model", model_y},
                                 {"residual", nd.data.y[i] - model_y}});
        }
        datasets.push_back({{"file", nd.file}, {"residuals", residuals}});
    }
    report["datasets"] = datasets;

    write_file(ctx.out / "fit_report.json", report.dump(2) + "\n");
    write_manifest(ctx, options, {"fit_report.json"});
    if (kind == "powerlaw") {
        std::cout << "A=" << format_double(fit.params[0])
                  << " n=" << format_double(fit.params[1]) << "\n";
    } else {
        std::cout << "sigma_S_V=" << format_double(fit.params[0])
                  << " sigma_L_V=" << format_double(fit.params[1])
                  << " lambda_min_m=" << format_double(fit.params[2]) << "\n";
    }
    return kExitOk;
}

int cmd_patchmap(const CliOptions& options) {
    RunContext ctx = make_context(options);
    const RunConfig& cfg = ctx.cfg;

    // The surface keeps its own seed from [surface] unless the CLI master
    // seed was overridden explicitly.
    SurfaceSpec spec = cfg.surface;
    if (options.seed.has_value()) {
        spec.rng_seed = derive_seed(*options.seed, "patchmap-surface");
    }
    PotentialMap truth = synthesize_surface(spec);
    PotentialMap scanned =
        kelvin_scan(truth, cfg.kelvin.tip_diameter, cfg.kelvin.step);

    write_map_csv(ctx.out / "true_map.csv", truth);
    write_map_csv(ctx.out / "scanned_map.csv", scanned);

    // Scale separation cutoff for the long/short decomposition, clamped to
    // the legal window.
    double cutoff = std::sqrt(spec.corr_S * spec.corr_L);
    const double lo = 2.0 * truth.pitch;
    const double hi = std::min(truth.extent_x(), truth.extent_y()) / 2.0;
    cutoff = std::min(std::max(cutoff, lo), hi);
    const MapStatistics stats = map_statistics(truth, cutoff);

    json report;
    report["true_sigma_V"] = map_std(truth);
    report["scanned_sigma_V"] = map_std(scanned);
    report["cutoff_lambda_m"] = cutoff;
    report["sigma_L_est_V"] = stats.sigma_L_est;
    report["sigma_S_est_V"] = stats.sigma_S_est;
    report["mean_V"] = stats.mean;
    report["tip_diameter_m"] = cfg.kelvin.tip_diameter;
    report["step_m"] = cfg.kelvin.step;
    write_file(ctx.out / "map_statistics.json", report.dump(2) + "\n");
    write_manifest(ctx, options,
                   {"true_map.csv", "scanned_map.csv", "map_statistics.json"});
    std::cout << "true_sigma_V=" << format_double(map_std(truth))
              << " scanned_sigma_V=" << format_double(map_std(scanned)) << "\n";
    return kExitOk;
}

int cmd_rerun(const CliOptions& options) {
    if (options.manifest_path.empty()) {
        throw config_error("rerun needs --manifest <path>");
    }
    const json m = json::parse(read_file(options.manifest_path));
    CliOptions replay;
    replay.subcommand = m.at("subcommand").get<std::string>();
    replay.out_dir = options.out_dir;
    if (m.value("seed_overridden", false)) {
        replay.seed = m.at("seed").get<std::uint64_t>();
    }
    if (m.contains("sweep_kind")) {
        replay.sweep_kind = m["sweep_kind"].get<std::string>();
    }
    if (m.contains("fit_model")) {
        replay.fit_model = m["fit_model"].get<std::string>();
    }
    for (const auto& f : m.at("data_files")) {
        const std::string path = f.at("path").get<std::string>();
        if (fnv1a_hex(read_file(path)) != f.at("fnv64").get<std::string>()) {
            throw config_error("data file changed since the original run: " +
                               path);
        }
        replay.data_files.push_back(path);
    }
    // Re-materialize the embedded config next to the new outputs.
    const fs::path out = resolve_out_dir(options);
    const fs::path cfg_path = out / "rerun_config.ini";
    write_file(cfg_path, m.at("config_text").get<std::string>());
    replay.config_path = cfg_path.string();
    return run_command(replay);
}

} // namespace

int run_command(const CliOptions& options) {
    try {
        if (options.subcommand == "simulate") return cmd_simulate(options);
        if (options.subcommand == "sweep") return cmd_sweep(options);
        if (options.subcommand == "calibrate") return cmd_calibrate(options);
        if (options.subcommand == "fit") return cmd_fit(options);
        if (options.subcommand == "patchmap") return cmd_patchmap(options);
        if (options.subcommand == "rerun") return cmd_rerun(options);
        std::cerr << "error: unknown subcommand \"" << options.subcommand
                  << "\"\n";
        return kExitConfig;
    } catch (const fit_error& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitFit;
    } catch (const integration_error& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSimulation;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace platesim
