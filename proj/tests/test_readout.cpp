#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "platesim/constants.hpp"
#include "platesim/errors.hpp"
#include "platesim/readout.hpp"
#include "platesim/rng.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <vector>

using namespace platesim;

namespace {

TimeSeries make_series(std::vector<double> v, double rate, SignalUnit unit) {
    TimeSeries ts;
    ts.samples = std::move(v);
    ts.sample_rate = rate;
    ts.unit = unit;
    return ts;
}

TimeSeries sinusoid(double amp, double freq, double phase, double rate,
                    std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = amp * std::cos(2.0 * kPi * freq * static_cast<double>(i) / rate +
                              phase);
    }
    return make_series(std::move(v), rate, SignalUnit::meters);
}

} // namespace

TEST_CASE("fringe conversion to volts") {
    const ReadoutParams ro; // 633 nm, 2.3 V
    const TimeSeries x = make_series({1e-8, 0.0, -1e-8}, 100.0, SignalUnit::meters);
    const TimeSeries v = displacement_to_voltage(x, ro);
    CHECK(v.unit == SignalUnit::volts);
    CHECK(v.samples[0] == doctest::Approx(0.2283).epsilon(1e-3));
    CHECK(v.samples[1] == 0.0);
    CHECK(v.samples[2] == doctest::Approx(-0.2283).epsilon(1e-3));
}

TEST_CASE("fringe conversion to displacement") {
    const ReadoutParams ro;
    const TimeSeries v = make_series({2.3, 0.0}, 100.0, SignalUnit::volts);
    const TimeSeries x = voltage_to_displacement(v, ro);
    // V = Vfr corresponds to lambda / 2 pi
    CHECK(x.samples[0] == doctest::Approx(100.73e-9).epsilon(1e-3));
    CHECK(x.samples[1] == 0.0);

    ReadoutParams half = ro;
    half.Vfr /= 2.0;
    const TimeSeries x2 = voltage_to_displacement(v, half);
    CHECK(x2.samples[0] == doctest::Approx(2.0 * x.samples[0]).epsilon(1e-12));
}

TEST_CASE("conversion round trip is identity") {
    const ReadoutParams ro;
    const TimeSeries x = sinusoid(5e-9, 10.0, 0.3, 1000.0, 500);
    const TimeSeries back = voltage_to_displacement(displacement_to_voltage(x, ro), ro);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        CHECK(back.samples[i] == doctest::Approx(x.samples[i]).epsilon(1e-12));
    }
}

TEST_CASE("linear fringe regime is enforced") {
    const ReadoutParams ro;
    const TimeSeries x =
        make_series({0.0, ro.lambda_laser / 10.0}, 100.0, SignalUnit::meters);
    CHECK_THROWS_AS(displacement_to_voltage(x, ro), std::range_error);

    const TimeSeries volts = make_series({0.1, 0.2}, 100.0, SignalUnit::volts);
    CHECK_THROWS_AS(displacement_to_voltage(volts, ro), std::invalid_argument);
    const TimeSeries meters = make_series({1e-9, 2e-9}, 100.0, SignalUnit::meters);
    CHECK_THROWS_AS(voltage_to_displacement(meters, ro), std::invalid_argument);
}

TEST_CASE("zero ASD noise returns the input bit-exactly") {
    const TimeSeries x = sinusoid(1e-9, 5.0, 0.0, 500.0, 1000);
    NoiseSpec spec;
    spec.asd_displacement = 0.0;
    const TimeSeries y = add_noise(x, spec);
    CHECK(y.samples == x.samples);
}

TEST_CASE("noise sample deviation follows ASD sqrt(rate/2)") {
    TimeSeries zeros = make_series(std::vector<double>(1000000, 0.0), 1000.0,
                                   SignalUnit::meters);
    NoiseSpec spec;
    spec.asd_displacement = 3e-11;
    spec.rng_seed = 77;
    const TimeSeries y = add_noise(zeros, spec);
    double var = 0.0;
    for (double v : y.samples) var += v * v;
    var /= static_cast<double>(y.samples.size());
    const double expected = 3e-11 * std::sqrt(1000.0 / 2.0); // 6.7e-10
    CHECK(std::sqrt(var) == doctest::Approx(expected).epsilon(0.01));

    // day factor scales the deviation
    spec.day_factor = 2.0;
    const TimeSeries y2 = add_noise(zeros, spec);
    double var2 = 0.0;
    for (double v : y2.samples) var2 += v * v;
    var2 /= static_cast<double>(y2.samples.size());
    CHECK(std::sqrt(var2) == doctest::Approx(2.0 * expected).epsilon(0.01));
}

TEST_CASE("noise is deterministic per seed") {
    const TimeSeries x = sinusoid(1e-10, 7.0, 0.0, 700.0, 2000);
    NoiseSpec spec;
    spec.rng_seed = 1234;
    const TimeSeries a = add_noise(x, spec);
    const TimeSeries b = add_noise(x, spec);
    CHECK(a.samples == b.samples);
    spec.rng_seed = 1235;
    const TimeSeries c = add_noise(x, spec);
    CHECK(a.samples != c.samples);
}

TEST_CASE("demodulating a matched sinusoid recovers amplitude and phase") {
    const double amp = 3.7e-10;
    const TimeSeries x = sinusoid(amp, 10.0, 0.0, 1000.0, 2000); // 20 periods
    const Phasor ph = demodulate(x, 10.0, 0.0);
    CHECK(std::abs(ph.amplitude - amp) <= 1e-10 * amp);
    CHECK(std::abs(ph.phase) < 1e-9);

    const TimeSeries shifted = sinusoid(amp, 10.0, 0.77, 1000.0, 2000);
    const Phasor ph2 = demodulate(shifted, 10.0, 0.0);
    CHECK(ph2.phase == doctest::Approx(0.77).epsilon(1e-9));
    CHECK(ph2.amplitude == doctest::Approx(amp).epsilon(1e-10));
}

TEST_CASE("demodulation rejects DC over integer periods") {
    const TimeSeries dc =
        make_series(std::vector<double>(3000, 5.0), 1000.0, SignalUnit::volts);
    const Phasor ph = demodulate(dc, 10.0, 0.0);
    CHECK(ph.amplitude < 1e-10 * 5.0);
}

TEST_CASE("demodulation is linear") {
    const TimeSeries x = sinusoid(2e-10, 10.0, 0.4, 1000.0, 3000);
    const TimeSeries y = sinusoid(5e-10, 10.0, -1.1, 1000.0, 3000);
    TimeSeries combo = x;
    for (std::size_t i = 0; i < combo.samples.size(); ++i) {
        combo.samples[i] = 2.0 * x.samples[i] + 3.0 * y.samples[i];
    }
    auto as_complex = [](const Phasor& p) {
        return std::polar(p.amplitude, p.phase);
    };
    const std::complex<double> lhs = as_complex(demodulate(combo, 10.0, 0.0));
    const std::complex<double> rhs = 2.0 * as_complex(demodulate(x, 10.0, 0.0)) +
                                     3.0 * as_complex(demodulate(y, 10.0, 0.0));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
}

TEST_CASE("demodulation window must hold ten periods") {
    const TimeSeries x = sinusoid(1e-10, 10.0, 0.0, 1000.0, 500); // 5 periods
    CHECK_THROWS_AS(demodulate(x, 10.0, 0.0), std::invalid_argument);
    const TimeSeries ok = sinusoid(1e-10, 10.0, 0.0, 1000.0, 2000);
    CHECK_THROWS_AS(demodulate(ok, 10.0, 1.9), std::invalid_argument);
}

TEST_CASE("noise-only demodulation quadrature scatter is ASD/sqrt(T)") {
    // Monte Carlo oracle: over many seeds the in-phase quadrature of a
    // noise-only demodulation has std ASD/sqrt(T).
    const double asd = 3e-11;
    const double rate = 200.0;
    const double T = 100.0;
    const int n_seeds = 200;
    TimeSeries zeros = make_series(
        std::vector<double>(static_cast<std::size_t>(rate * T), 0.0), rate,
        SignalUnit::meters);
    NoiseSpec spec;
    spec.asd_displacement = asd;
    std::vector<double> quadratures;
    for (int s = 0; s < n_seeds; ++s) {
        spec.rng_seed = derive_seed(99, "demod-mc", s);
        const TimeSeries noisy = add_noise(zeros, spec);
        const Phasor ph = demodulate(noisy, 10.0, 0.0);
        quadratures.push_back(ph.amplitude * std::cos(ph.phase));
    }
    double var = 0.0;
    double mean = 0.0;
    for (double q : quadratures) mean += q;
    mean /= n_seeds;
    for (double q : quadratures) var += (q - mean) * (q - mean);
    var /= (n_seeds - 1);
    const double expected = asd / std::sqrt(T); // 3e-12 m
    CHECK(std::sqrt(var) == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("sigma_amplitude tracks the quadrature scatter") {
    const double asd = 3e-11;
    const double rate = 200.0;
    TimeSeries zeros = make_series(std::vector<double>(20000, 0.0), rate,
                                   SignalUnit::meters);
    NoiseSpec spec;
    spec.asd_displacement = asd;
    spec.rng_seed = 5;
    TimeSeries noisy = add_noise(zeros, spec);
    // strong carrier so the projection direction is well defined
    for (std::size_t i = 0; i < noisy.samples.size(); ++i) {
        noisy.samples[i] +=
            1e-9 * std::cos(2.0 * kPi * 10.0 * static_cast<double>(i) / rate);
    }
    const Phasor ph = demodulate(noisy, 10.0, 0.0);
    const double expected = asd / std::sqrt(100.0);
    CHECK(ph.sigma_amplitude == doctest::Approx(expected).epsilon(0.5));
}

TEST_CASE("white noise spectral density is flat at the requested ASD") {
    const double asd = 3e-11;
    TimeSeries zeros = make_series(std::vector<double>(2000000, 0.0), 1000.0,
                                   SignalUnit::meters);
    NoiseSpec spec;
    spec.asd_displacement = asd;
    spec.rng_seed = 31;
    const TimeSeries noisy = add_noise(zeros, spec);
    const auto spectrum = amplitude_spectral_density(noisy);
    for (const auto& [freq, level] : spectrum) {
        if (freq < 1.0 || freq > 100.0) continue;
        CHECK(level == doctest::Approx(asd).epsilon(0.10));
    }
}

TEST_CASE("sinusoid line power integrates to A^2/2") {
    const double rate = 1000.0;
    const double amp = 2e-9;
    const double freq = 52.0 * rate / 1024.0; // bin-centered
    const TimeSeries x = sinusoid(amp, freq, 0.0, rate, 1 << 17);
    const auto spectrum = amplitude_spectral_density(x);
    const double df = rate / 1024.0;
    double power = 0.0;
    for (const auto& [f, level] : spectrum) {
        if (std::abs(f - freq) <= 4.5 * df) power += level * level * df;
    }
    CHECK(power == doctest::Approx(amp * amp / 2.0).epsilon(0.01));
}

TEST_CASE("zero series has zero spectrum; short series are rejected") {
    const TimeSeries zeros = make_series(std::vector<double>(4096, 0.0), 1000.0,
                                         SignalUnit::meters);
    for (const auto& [f, level] : amplitude_spectral_density(zeros)) {
        CHECK(level == 0.0);
    }
    const TimeSeries tiny =
        make_series(std::vector<double>(512, 0.0), 1000.0, SignalUnit::meters);
    CHECK_THROWS_AS(amplitude_spectral_density(tiny), std::invalid_argument);
}

TEST_CASE("time series CSV round trip is bit-exact") {
    const TimeSeries x = sinusoid(1.7e-10, 13.0, 0.9, 4000.0, 256);
    const auto path = std::filesystem::temp_directory_path() /
                      "platesim_test_timeseries.csv";
    write_timeseries_csv(path, x);
    const TimeSeries back = read_timeseries_csv(path);
    CHECK(back.sample_rate == x.sample_rate);
    CHECK(back.unit == x.unit);
    CHECK(back.samples == x.samples);
    std::filesystem::remove(path);
}

TEST_CASE("time series validation") {
    TimeSeries bad;
    bad.sample_rate = 0.0;
    bad.samples = {1.0, 2.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.sample_rate = 10.0;
    bad.samples = {1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.samples = {1.0, std::nan("")};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
