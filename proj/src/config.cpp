#include "platesim/config.hpp"

#include "platesim/constants.hpp"
#include "platesim/errors.hpp"

#include <cmath>

namespace platesim {

double stiffness(const ResonatorParams& res) {
    const double omega = 2.0 * kPi * res.freq_r;
    return res.mass_m * omega * omega;
}

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace

ValidationReport validate_config(const ApparatusConfig& cfg) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    if (!positive(cfg.plate.area_S)) fail("plate.area_m2: area must be positive");
    if (!positive(cfg.plate.lateral_L))
        fail("plate.lateral_m: lateral dimension must be positive");
    if (positive(cfg.plate.area_S) && positive(cfg.plate.lateral_L) &&
        cfg.plate.area_S > cfg.plate.lateral_L * cfg.plate.lateral_L) {
        fail("plate.area_m2: area exceeds lateral_m squared");
    }

    if (!positive(cfg.resonator.mass_m))
        fail("resonator.mass_kg: mass must be positive");
    if (!positive(cfg.resonator.freq_r))
        fail("resonator.freq_hz: frequency must be positive");
    if (!positive(cfg.resonator.quality_Q))
        fail("resonator.quality: quality factor must be positive");

    if (!positive(cfg.gap.d0)) {
        fail("gap.d0_m: separation must be positive");
    } else {
        if (!(std::isfinite(cfg.gap.xs0) && cfg.gap.xs0 >= 0.0)) {
            fail("gap.xs0_m: modulation amplitude must be non-negative");
        } else if (cfg.gap.xs0 >= cfg.gap.d0) {
            fail("gap.xs0_m: modulation amplitude must be < separation");
        } else {
            const double ratio = cfg.gap.xs0 / cfg.gap.d0;
            if (ratio > 0.1) {
                fail("gap.xs0_m: xs0/d0 exceeds 0.1, outside the small-"
                     "modulation regime");
            } else if (ratio > 0.01) {
                rep.warnings.push_back(
                    "gap.xs0_m: xs0/d0 > 0.01, first-order theory accurate to "
                    "about (xs0/d0)^2");
            }
        }
    }
    if (!positive(cfg.gap.freq_s))
        fail("gap.freq_s_hz: source frequency must be positive");
    if (!std::isfinite(cfg.gap.Vg)) fail("gap.vg_V: bias must be finite");
    if (!std::isfinite(cfg.gap.V0)) fail("gap.v0_V: residual bias must be finite");

    if (!positive(cfg.readout.lambda_laser))
        fail("readout.lambda_m: wavelength must be positive");
    if (!positive(cfg.readout.Vfr))
        fail("readout.vfr_V: fringe voltage must be positive");

    if (!(std::isfinite(cfg.noise.asd_displacement) &&
          cfg.noise.asd_displacement >= 0.0)) {
        fail("noise.asd_m_rtHz: spectral density must be non-negative");
    }
    if (!(std::isfinite(cfg.noise.day_factor) && cfg.noise.day_factor >= 1.0)) {
        fail("noise.day_factor: must be >= 1");
    }

    return rep;
}

namespace {

struct KeyReader {
    const IniSection& section;
    std::vector<std::string> known;

    double number(const std::string& key, double fallback) {
        known.push_back(key);
        const std::string* raw = section.find(key);
        if (raw == nullptr) return fallback;
        return parse_double(*raw, "[" + section.name + "]." + key);
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
        known.push_back(key);
        const std::string* raw = section.find(key);
        if (raw == nullptr) return fallback;
        return static_cast<std::uint64_t>(
            parse_integer(*raw, "[" + section.name + "]." + key));
    }

    void reject_unknown() const {
        for (const auto& [k, v] : section.entries) {
            bool found = false;
            for (const auto& known_key : known) {
                if (k == known_key) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw config_error("unknown key \"" + k + "\" in section [" +
                                   section.name + "]");
            }
        }
    }
};

} // namespace

ApparatusConfig apparatus_from_ini(const IniDoc& doc) {
    ApparatusConfig cfg;
    if (const IniSection* s = doc.find("plate")) {
        KeyReader r{*s, {}};
        cfg.plate.area_S = r.number("area_m2", cfg.plate.area_S);
        cfg.plate.lateral_L = r.number("lateral_m", cfg.plate.lateral_L);
        r.reject_unknown();
    }
    if (const IniSection* s = doc.find("resonator")) {
        KeyReader r{*s, {}};
        cfg.resonator.mass_m = r.number("mass_kg", cfg.resonator.mass_m);
        cfg.resonator.freq_r = r.number("freq_hz", cfg.resonator.freq_r);
        cfg.resonator.quality_Q = r.number("quality", cfg.resonator.quality_Q);
        r.reject_unknown();
    }
    if (const IniSection* s = doc.find("gap")) {
        KeyReader r{*s, {}};
        cfg.gap.d0 = r.number("d0_m", cfg.gap.d0);
        cfg.gap.xs0 = r.number("xs0_m", cfg.gap.xs0);
        cfg.gap.freq_s = r.number("freq_s_hz", cfg.gap.freq_s);
        cfg.gap.Vg = r.number("vg_V", cfg.gap.Vg);
        cfg.gap.V0 = r.number("v0_V", cfg.gap.V0);
        r.reject_unknown();
    }
    if (const IniSection* s = doc.find("readout")) {
        KeyReader r{*s, {}};
        cfg.readout.lambda_laser = r.number("lambda_m", cfg.readout.lambda_laser);
        cfg.readout.Vfr = r.number("vfr_V", cfg.readout.Vfr);
        r.reject_unknown();
    }
    if (const IniSection* s = doc.find("noise")) {
        KeyReader r{*s, {}};
        cfg.noise.asd_displacement =
            r.number("asd_m_rtHz", cfg.noise.asd_displacement);
        cfg.noise.day_factor = r.number("day_factor", cfg.noise.day_factor);
        cfg.noise.rng_seed = r.integer("seed", cfg.noise.rng_seed);
        r.reject_unknown();
    }
    return cfg;
}

void apparatus_to_ini(const ApparatusConfig& cfg, IniDoc& doc) {
    auto num = [](double v) { return format_double(v); };
    doc.sections.push_back(
        {"plate",
         {{"area_m2", num(cfg.plate.area_S)},
          {"lateral_m", num(cfg.plate.lateral_L)}}});
    doc.sections.push_back(
        {"resonator",
         {{"mass_kg", num(cfg.resonator.mass_m)},
          {"freq_hz", num(cfg.resonator.freq_r)},
          {"quality", num(cfg.resonator.quality_Q)}}});
    doc.sections.push_back({"gap",
                            {{"d0_m", num(cfg.gap.d0)},
                             {"xs0_m", num(cfg.gap.xs0)},
                             {"freq_s_hz", num(cfg.gap.freq_s)},
                             {"vg_V", num(cfg.gap.Vg)},
                             {"v0_V", num(cfg.gap.V0)}}});
    doc.sections.push_back({"readout",
                            {{"lambda_m", num(cfg.readout.lambda_laser)},
                             {"vfr_V", num(cfg.readout.Vfr)}}});
    doc.sections.push_back(
        {"noise",
         {{"asd_m_rtHz", num(cfg.noise.asd_displacement)},
          {"day_factor", num(cfg.noise.day_factor)},
          {"seed", std::to_string(cfg.noise.rng_seed)}}});
}

} // namespace platesim
