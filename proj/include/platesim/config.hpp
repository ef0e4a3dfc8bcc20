#pragma once

// Apparatus configuration: plate geometry, resonator mechanics, gap state,
// interferometer readout and noise level. One ApparatusConfig is the single
// source of truth for a simulated run. All values SI.
//
// All types here are immutable value objects once constructed; they can be
// shared freely between threads.

#include "platesim/ini.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace platesim {

struct PlateGeometry {
    double area_S = 1e-4;    // effective facing area [m^2]
    double lateral_L = 1e-2; // lateral plate dimension [m]
};

// The default mass is the bare geometric plate mass: 1 cm x 1 cm x 50 um of
// silicon at 2330 kg/m^3. The 0.4 um aluminium coating would add < 5% and is
// ignored; electrostatic calibration replaces the value with the measured
// effective stiffness anyway.
struct ResonatorParams {
    double mass_m = 1.165e-5; // effective modal mass [kg]
    double freq_r = 125.0;    // proper frequency [Hz]
    double quality_Q = 2000.0;
};

struct GapState {
    double d0 = 5e-6;     // mean plate separation [m]
    double xs0 = 45e-9;   // source modulation amplitude [m]
    double freq_s = 10.0; // source modulation frequency [Hz]
    double Vg = 0.0;      // applied bias [V]
    double V0 = 0.2447;   // residual contact potential [V]
};

struct ReadoutParams {
    double lambda_laser = 633e-9; // laser wavelength [m]
    double Vfr = 2.3;             // photodiode voltage per fringe [V]
};

struct NoiseSpec {
    double asd_displacement = 3e-11; // one-sided ASD [m/sqrt(Hz)]
    double day_factor = 1.0;         // >= 1; daytime degradation multiplier
    std::uint64_t rng_seed = 1;
};

struct ApparatusConfig {
    PlateGeometry plate;
    ResonatorParams resonator;
    GapState gap;
    ReadoutParams readout;
    NoiseSpec noise;
};

// k = m (2 pi nu_r)^2
double stiffness(const ResonatorParams& res);

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

// Checks every structural invariant. Pure: never mutates the input, equal
// configs produce equal reports. Violations make the config unusable;
// warnings flag values outside the regime where the small-signal theory is
// accurate (xs0/d0 > 0.01).
ValidationReport validate_config(const ApparatusConfig& cfg);

// INI serialization (sections: plate, resonator, gap, readout, noise).
// Unknown keys within these sections are hard errors. Round-trips
// bit-exactly.
ApparatusConfig apparatus_from_ini(const IniDoc& doc);
void apparatus_to_ini(const ApparatusConfig& cfg, IniDoc& doc);

} // namespace platesim
