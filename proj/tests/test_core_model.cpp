#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "platesim/config.hpp"
#include "platesim/errors.hpp"
#include "platesim/ini.hpp"

#include <cmath>

using namespace platesim;

TEST_CASE("default configuration is valid") {
    ApparatusConfig cfg; // S=1 cm^2, nu_r=125 Hz, Q=2000, xs0=45 nm, d0=5 um
    const ValidationReport rep = validate_config(cfg);
    CHECK(rep.ok());
    CHECK(rep.warnings.empty()); // 45 nm / 5 um = 0.009 < 0.01
}

TEST_CASE("modulation amplitude must stay below the separation") {
    ApparatusConfig cfg;
    cfg.gap.xs0 = cfg.gap.d0;
    const ValidationReport rep = validate_config(cfg);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations) {
        if (v.find("modulation amplitude must be < separation") != std::string::npos) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("zero separation is a violation") {
    ApparatusConfig cfg;
    cfg.gap.d0 = 0.0;
    const ValidationReport rep = validate_config(cfg);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations) {
        if (v.find("separation must be positive") != std::string::npos) found = true;
    }
    CHECK(found);
}

TEST_CASE("xs0/d0 above 0.01 warns but passes") {
    ApparatusConfig cfg;
    cfg.gap.d0 = 3e-6; // 45 nm / 3 um = 0.015
    const ValidationReport rep = validate_config(cfg);
    CHECK(rep.ok());
    CHECK(rep.warnings.size() == 1);

    cfg.gap.xs0 = 0.2 * cfg.gap.d0; // past the 0.1 hard limit
    CHECK_FALSE(validate_config(cfg).ok());
}

TEST_CASE("validation is pure") {
    ApparatusConfig cfg;
    cfg.gap.d0 = 3e-6;
    const ValidationReport a = validate_config(cfg);
    const ValidationReport b = validate_config(cfg);
    CHECK(a.violations == b.violations);
    CHECK(a.warnings == b.warnings);
}

TEST_CASE("stiffness of the default resonator") {
    ResonatorParams res; // 1.165e-5 kg plate, 125 Hz
    CHECK(stiffness(res) == doctest::Approx(7.1863).epsilon(1e-3));

    ResonatorParams heavier = res;
    heavier.mass_m *= 2.0;
    CHECK(stiffness(heavier) == doctest::Approx(2.0 * stiffness(res)).epsilon(1e-12));

    ResonatorParams faster = res;
    faster.freq_r *= 2.0;
    CHECK(stiffness(faster) == doctest::Approx(4.0 * stiffness(res)).epsilon(1e-12));
}

TEST_CASE("default config round-trips through INI bit-exactly") {
    const ApparatusConfig cfg;
    IniDoc doc;
    apparatus_to_ini(cfg, doc);
    const std::string text = serialize_ini(doc);
    const ApparatusConfig back = apparatus_from_ini(parse_ini(text));

    CHECK(back.plate.area_S == cfg.plate.area_S);
    CHECK(back.plate.lateral_L == cfg.plate.lateral_L);
    CHECK(back.resonator.mass_m == cfg.resonator.mass_m);
    CHECK(back.resonator.freq_r == cfg.resonator.freq_r);
    CHECK(back.resonator.quality_Q == cfg.resonator.quality_Q);
    CHECK(back.gap.d0 == cfg.gap.d0);
    CHECK(back.gap.xs0 == cfg.gap.xs0);
    CHECK(back.gap.freq_s == cfg.gap.freq_s);
    CHECK(back.gap.Vg == cfg.gap.Vg);
    CHECK(back.gap.V0 == cfg.gap.V0);
    CHECK(back.readout.lambda_laser == cfg.readout.lambda_laser);
    CHECK(back.readout.Vfr == cfg.readout.Vfr);
    CHECK(back.noise.asd_displacement == cfg.noise.asd_displacement);
    CHECK(back.noise.day_factor == cfg.noise.day_factor);
    CHECK(back.noise.rng_seed == cfg.noise.rng_seed);
}

TEST_CASE("awkward double values survive the text round trip") {
    ApparatusConfig cfg;
    cfg.gap.d0 = 0.1 + 0.2;                // 0.30000000000000004
    cfg.gap.xs0 = 4.9406564584124654e-310; // subnormal
    cfg.readout.Vfr = 2.2999999999999998;
    IniDoc doc;
    apparatus_to_ini(cfg, doc);
    const ApparatusConfig back = apparatus_from_ini(parse_ini(serialize_ini(doc)));
    CHECK(back.gap.d0 == cfg.gap.d0);
    CHECK(back.gap.xs0 == cfg.gap.xs0);
    CHECK(back.readout.Vfr == cfg.readout.Vfr);
}

TEST_CASE("unknown keys are hard errors") {
    CHECK_THROWS_AS(apparatus_from_ini(parse_ini("[gap]\nd0_m = 5e-6\nbogus = 1\n")),
                    config_error);
}

TEST_CASE("malformed INI input") {
    CHECK_THROWS_AS(parse_ini("[gap\nd0_m = 1\n"), config_error);
    CHECK_THROWS_AS(parse_ini("key_outside_section = 1\n"), config_error);
    CHECK_THROWS_AS(parse_ini("[gap]\nd0_m = 1\nd0_m = 2\n"), config_error);
    CHECK_THROWS_AS(apparatus_from_ini(parse_ini("[gap]\nd0_m = abc\n")),
                    config_error);
}
