#pragma once

// Uniformly sampled scalar signals and demodulation results.

#include <filesystem>
#include <string>
#include <vector>

namespace platesim {

enum class SignalUnit { meters, volts };

std::string unit_name(SignalUnit u);
SignalUnit unit_from_name(const std::string& name);

struct TimeSeries {
    std::vector<double> samples;
    double sample_rate = 0.0; // [Hz]
    SignalUnit unit = SignalUnit::meters;

    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }

    // Throws std::invalid_argument unless rate > 0, >= 2 samples, all finite.
    void validate() const;
};

// Demodulation result at a reference frequency. amplitude and
// sigma_amplitude carry the unit of the source series; phase in (-pi, pi].
struct Phasor {
    double amplitude = 0.0;
    double phase = 0.0; // [rad]
    double freq = 0.0;  // [Hz]
    double sigma_amplitude = 0.0;
};

// CSV export/import; the header records sample rate and unit.
void write_timeseries_csv(const std::filesystem::path& path,
                          const TimeSeries& ts);
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

} // namespace platesim
