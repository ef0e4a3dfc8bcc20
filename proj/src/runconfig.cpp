#include "platesim/runconfig.hpp"

#include "platesim/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace platesim {

namespace {

double section_number(const IniSection& s, const std::string& key,
                      double fallback) {
    const std::string* raw = s.find(key);
    if (raw == nullptr) return fallback;
    return parse_double(*raw, "[" + s.name + "]." + key);
}

long long section_integer(const IniSection& s, const std::string& key,
                          long long fallback) {
    const std::string* raw = s.find(key);
    if (raw == nullptr) return fallback;
    return parse_integer(*raw, "[" + s.name + "]." + key);
}

std::string section_string(const IniSection& s, const std::string& key,
                           const std::string& fallback) {
    const std::string* raw = s.find(key);
    return raw ? *raw : fallback;
}

std::vector<double> parse_number_list(const std::string& raw,
                                      const std::string& context) {
    std::vector<double> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(parse_double(item, context));
    }
    return out;
}

std::vector<std::string> parse_name_list(const std::string& raw) {
    std::vector<std::string> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void reject_unknown_keys(const IniSection& s,
                         const std::set<std::string>& allowed) {
    for (const auto& [k, v] : s.entries) {
        if (allowed.find(k) == allowed.end()) {
            throw config_error("unknown key \"" + k + "\" in section [" +
                               s.name + "]");
        }
    }
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    const IniDoc doc = parse_ini(text);
    static const std::set<std::string> known_sections = {
        "plate",   "resonator", "gap",   "readout",        "noise",
        "model",   "run",       "sweep", "bias_sweep",     "distance_sweep",
        "surface", "kelvin"};
    for (const auto& s : doc.sections) {
        if (known_sections.find(s.name) == known_sections.end()) {
            throw config_error("unknown section [" + s.name + "]");
        }
    }

    RunConfig cfg;
    cfg.apparatus = apparatus_from_ini(doc);

    if (const IniSection* s = doc.find("model")) {
        reject_unknown_keys(*s, {"type", "coefficient", "exponent", "sigma_s_V",
                                 "sigma_l_V", "lambda_min_m", "lambda_max_m",
                                 "components"});
        cfg.model.type = section_string(*s, "type", cfg.model.type);
        cfg.model.powerlaw_C =
            section_number(*s, "coefficient", cfg.model.powerlaw_C);
        cfg.model.powerlaw_n = section_number(*s, "exponent", cfg.model.powerlaw_n);
        cfg.model.patch.sigma_S =
            section_number(*s, "sigma_s_V", cfg.model.patch.sigma_S);
        cfg.model.patch.sigma_L =
            section_number(*s, "sigma_l_V", cfg.model.patch.sigma_L);
        cfg.model.patch.lambda_min =
            section_number(*s, "lambda_min_m", cfg.model.patch.lambda_min);
        cfg.model.patch.lambda_max =
            section_number(*s, "lambda_max_m", cfg.model.patch.lambda_max);
        if (const std::string* raw = s->find("components")) {
            cfg.model.sum_components = parse_name_list(*raw);
        }
    }
    if (const IniSection* s = doc.find("run")) {
        reject_unknown_keys(*s, {"duration_s", "sample_rate_hz"});
        cfg.run.duration = section_number(*s, "duration_s", cfg.run.duration);
        cfg.run.sample_rate =
            section_number(*s, "sample_rate_hz", cfg.run.sample_rate);
    }
    if (const IniSection* s = doc.find("sweep")) {
        reject_unknown_keys(*s, {"axis", "values", "duration_s"});
        cfg.sweep.axis = section_string(*s, "axis", cfg.sweep.axis);
        if (const std::string* raw = s->find("values")) {
            cfg.sweep.values = parse_number_list(*raw, "[sweep].values");
        }
        cfg.sweep.duration = section_number(*s, "duration_s", cfg.sweep.duration);
    }
    if (const IniSection* s = doc.find("bias_sweep")) {
        reject_unknown_keys(*s, {"vg_min_V", "vg_max_V", "points", "duration_s",
                                 "check_distances_m"});
        cfg.bias.vg_min = section_number(*s, "vg_min_V", cfg.bias.vg_min);
        cfg.bias.vg_max = section_number(*s, "vg_max_V", cfg.bias.vg_max);
        cfg.bias.points = static_cast<int>(
            section_integer(*s, "points", cfg.bias.points));
        cfg.bias.duration = section_number(*s, "duration_s", cfg.bias.duration);
        if (const std::string* raw = s->find("check_distances_m")) {
            cfg.bias.check_distances =
                parse_number_list(*raw, "[bias_sweep].check_distances_m");
        }
    }
    if (const IniSection* s = doc.find("distance_sweep")) {
        reject_unknown_keys(*s,
                            {"z_min_m", "z_max_m", "points", "d_r_m", "duration_s"});
        cfg.distance.z_min = section_number(*s, "z_min_m", cfg.distance.z_min);
        cfg.distance.z_max = section_number(*s, "z_max_m", cfg.distance.z_max);
        cfg.distance.points = static_cast<int>(
            section_integer(*s, "points", cfg.distance.points));
        cfg.distance.d_r = section_number(*s, "d_r_m", cfg.distance.d_r);
        cfg.distance.duration =
            section_number(*s, "duration_s", cfg.distance.duration);
    }
    if (const IniSection* s = doc.find("surface")) {
        reject_unknown_keys(
            *s, {"sigma_l_V", "corr_l_m", "sigma_s_V", "corr_s_m", "seed",
                 "extent_x_m", "extent_y_m", "pitch_m"});
        cfg.surface.sigma_L = section_number(*s, "sigma_l_V", cfg.surface.sigma_L);
        cfg.surface.corr_L = section_number(*s, "corr_l_m", cfg.surface.corr_L);
        cfg.surface.sigma_S = section_number(*s, "sigma_s_V", cfg.surface.sigma_S);
        cfg.surface.corr_S = section_number(*s, "corr_s_m", cfg.surface.corr_S);
        cfg.surface.rng_seed = static_cast<std::uint64_t>(
            section_integer(*s, "seed", static_cast<long long>(cfg.surface.rng_seed)));
        cfg.surface.extent_x =
            section_number(*s, "extent_x_m", cfg.surface.extent_x);
        cfg.surface.extent_y =
            section_number(*s, "extent_y_m", cfg.surface.extent_y);
        cfg.surface.pitch = section_number(*s, "pitch_m", cfg.surface.pitch);
    }
    if (const IniSection* s = doc.find("kelvin")) {
        reject_unknown_keys(*s, {"tip_diameter_m", "step_m"});
        cfg.kelvin.tip_diameter =
            section_number(*s, "tip_diameter_m", cfg.kelvin.tip_diameter);
        cfg.kelvin.step = section_number(*s, "step_m", cfg.kelvin.step);
    }
    return cfg;
}

std::string serialize_run_config(const RunConfig& cfg) {
    IniDoc doc;
    apparatus_to_ini(cfg.apparatus, doc);
    auto num = [](double v) { return format_double(v); };

    IniSection model{"model", {}};
    model.entries.emplace_back("type", cfg.model.type);
    model.entries.emplace_back("coefficient", num(cfg.model.powerlaw_C));
    model.entries.emplace_back("exponent", num(cfg.model.powerlaw_n));
    model.entries.emplace_back("sigma_s_V", num(cfg.model.patch.sigma_S));
    model.entries.emplace_back("sigma_l_V", num(cfg.model.patch.sigma_L));
    model.entries.emplace_back("lambda_min_m", num(cfg.model.patch.lambda_min));
    model.entries.emplace_back("lambda_max_m", num(cfg.model.patch.lambda_max));
    if (!cfg.model.sum_components.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < cfg.model.sum_components.size(); ++i) {
            if (i) joined += ",";
            joined += cfg.model.sum_components[i];
        }
        model.entries.emplace_back("components", joined);
    }
    doc.sections.push_back(std::move(model));

    doc.sections.push_back({"run",
                            {{"duration_s", num(cfg.run.duration)},
                             {"sample_rate_hz", num(cfg.run.sample_rate)}}});

    IniSection sweep{"sweep", {}};
    sweep.entries.emplace_back("axis", cfg.sweep.axis);
    if (!cfg.sweep.values.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
            if (i) joined += ",";
            joined += num(cfg.sweep.values[i]);
        }
        sweep.entries.emplace_back("values", joined);
    }
    sweep.entries.emplace_back("duration_s", num(cfg.sweep.duration));
    doc.sections.push_back(std::move(sweep));

    IniSection bias{"bias_sweep",
                    {{"vg_min_V", num(cfg.bias.vg_min)},
                     {"vg_max_V", num(cfg.bias.vg_max)},
                     {"points", std::to_string(cfg.bias.points)},
                     {"duration_s", num(cfg.bias.duration)}}};
    if (!cfg.bias.check_distances.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < cfg.bias.check_distances.size(); ++i) {
            if (i) joined += ",";
            joined += num(cfg.bias.check_distances[i]);
        }
        bias.entries.emplace_back("check_distances_m", joined);
    }
    doc.sections.push_back(std::move(bias));
    doc.sections.push_back({"distance_sweep",
                            {{"z_min_m", num(cfg.distance.z_min)},
                             {"z_max_m", num(cfg.distance.z_max)},
                             {"points", std::to_string(cfg.distance.points)},
                             {"d_r_m", num(cfg.distance.d_r)},
                             {"duration_s", num(cfg.distance.duration)}}});
    doc.sections.push_back({"surface",
                            {{"sigma_l_V", num(cfg.surface.sigma_L)},
                             {"corr_l_m", num(cfg.surface.corr_L)},
                             {"sigma_s_V", num(cfg.surface.sigma_S)},
                             {"corr_s_m", num(cfg.surface.corr_S)},
                             {"seed", std::to_string(cfg.surface.rng_seed)},
                             {"extent_x_m", num(cfg.surface.extent_x)},
                             {"extent_y_m", num(cfg.surface.extent_y)},
                             {"pitch_m", num(cfg.surface.pitch)}}});
    doc.sections.push_back({"kelvin",
                            {{"tip_diameter_m", num(cfg.kelvin.tip_diameter)},
                             {"step_m", num(cfg.kelvin.step)}}});
    return serialize_ini(doc);
}

namespace {

std::shared_ptr<const ForceModel> build_component(const RunConfig& cfg,
                                                  const GapState& gap,
                                                  const std::string& type) {
    try {
        if (type == "casimir") {
            return std::make_shared<CasimirForce>(cfg.apparatus.plate.area_S);
        }
        if (type == "electrostatic") {
            return std::make_shared<ElectrostaticForce>(cfg.apparatus.plate.area_S,
                                                        gap.Vg + gap.V0);
        }
        if (type == "powerlaw") {
            return std::make_shared<PowerLawForce>(cfg.model.powerlaw_C,
                                                   cfg.model.powerlaw_n);
        }
        if (type == "patch") {
            return std::make_shared<PatchForce>(cfg.model.patch,
                                                cfg.apparatus.plate.lateral_L);
        }
    } catch (const std::exception& e) {
        throw config_error("[model] " + type + ": " + e.what());
    }
    throw config_error("[model].type: unknown force model \"" + type + "\"");
}

} // namespace

std::shared_ptr<const ForceModel> build_force_model(const RunConfig& cfg,
                                                    const GapState& gap) {
    if (cfg.model.type == "sum") {
        if (cfg.model.sum_components.empty()) {
            throw config_error("[model].components: sum model needs components");
        }
        std::vector<std::shared_ptr<const ForceModel>> parts;
        for (const auto& name : cfg.model.sum_components) {
            if (name == "sum") {
                throw config_error("[model].components: nested sums not supported");
            }
            parts.push_back(build_component(cfg, gap, name));
        }
        return std::make_shared<SumForce>(std::move(parts));
    }
    return build_component(cfg, gap, cfg.model.type);
}

std::shared_ptr<const ForceModel> build_force_model(const RunConfig& cfg) {
    return build_force_model(cfg, cfg.apparatus.gap);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

} // namespace platesim
