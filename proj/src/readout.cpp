#include "platesim/readout.hpp"

#include "platesim/constants.hpp"
#include "platesim/errors.hpp"
#include "platesim/ini.hpp"
#include "platesim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <stdexcept>

namespace platesim {

std::string unit_name(SignalUnit u) {
    return u == SignalUnit::meters ? "meters" : "volts";
}

SignalUnit unit_from_name(const std::string& name) {
    if (name == "meters") return SignalUnit::meters;
    if (name == "volts") return SignalUnit::volts;
    throw config_error("unknown signal unit: \"" + name + "\"");
}

void TimeSeries::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw std::invalid_argument("time series sample rate must be positive");
    }
    if (samples.size() < 2) {
        throw std::invalid_argument("time series needs at least 2 samples");
    }
    for (double v : samples) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("time series contains non-finite values");
        }
    }
}

TimeSeries displacement_to_voltage(const TimeSeries& x, const ReadoutParams& ro) {
    x.validate();
    if (x.unit != SignalUnit::meters) {
        throw std::invalid_argument("displacement_to_voltage expects meters");
    }
    const double limit = ro.lambda_laser / 20.0;
    for (double v : x.samples) {
        if (std::abs(v) >= limit) {
            throw std::range_error(
                "displacement exceeds the linear fringe regime (|x| >= lambda/20)");
        }
    }
    const double gain = 2.0 * kPi / ro.lambda_laser * ro.Vfr;
    TimeSeries out = x;
    out.unit = SignalUnit::volts;
    for (double& v : out.samples) v *= gain;
    return out;
}

TimeSeries voltage_to_displacement(const TimeSeries& v, const ReadoutParams& ro) {
    v.validate();
    if (v.unit != SignalUnit::volts) {
        throw std::invalid_argument("voltage_to_displacement expects volts");
    }
    const double gain = ro.lambda_laser / (2.0 * kPi * ro.Vfr);
    TimeSeries out = v;
    out.unit = SignalUnit::meters;
    for (double& s : out.samples) s *= gain;
    return out;
}

TimeSeries add_noise(const TimeSeries& x, const NoiseSpec& spec) {
    x.validate();
    const double asd = spec.asd_displacement * spec.day_factor;
    if (asd == 0.0) return x;
    const double sigma = asd * std::sqrt(x.sample_rate / 2.0);
    GaussianSampler gauss(spec.rng_seed);
    TimeSeries out = x;
    for (double& v : out.samples) v += sigma * gauss();
    return out;
}

Phasor demodulate(const TimeSeries& x, double freq, double t_start) {
    x.validate();
    if (!(freq > 0.0)) {
        throw std::invalid_argument("demodulation frequency must be positive");
    }
    if (!(freq < x.sample_rate / 2.0)) {
        throw std::invalid_argument("demodulation frequency must be below Nyquist");
    }
    const double fs = x.sample_rate;
    const auto n_total = static_cast<std::size_t>(x.samples.size());
    std::size_t k0 = 0;
    if (t_start > 0.0) {
        k0 = static_cast<std::size_t>(std::ceil(t_start * fs - 1e-9));
    }
    if (k0 >= n_total) {
        throw std::invalid_argument("demodulation window starts past the series end");
    }
    const std::size_t n_avail = n_total - k0;
    const auto periods = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_avail) * freq / fs + 1e-9));
    if (periods < 10) {
        throw std::invalid_argument(
            "demodulation window must contain at least 10 full periods");
    }
    const auto n_used = static_cast<std::size_t>(
        std::floor(static_cast<double>(periods) * fs / freq + 1e-9));

    // Per-period phasors; their mean is the estimate, their scatter the
    // uncertainty. The reference phase is tied to the absolute time axis.
    const double omega = 2.0 * kPi * freq;
    std::vector<std::complex<double>> per_period(periods);
    const double samples_per_period = fs / freq;
    for (std::size_t p = 0; p < periods; ++p) {
        const auto j0 = static_cast<std::size_t>(
            std::floor(static_cast<double>(p) * samples_per_period + 1e-9));
        const auto j1 = static_cast<std::size_t>(
            std::floor(static_cast<double>(p + 1) * samples_per_period + 1e-9));
        double ci = 0.0;
        double si = 0.0;
        for (std::size_t j = j0; j < j1 && j < n_used; ++j) {
            const double t = static_cast<double>(k0 + j) / fs;
            const double v = x.samples[k0 + j];
            ci += v * std::cos(omega * t);
            si += v * std::sin(omega * t);
        }
        const double count = static_cast<double>(std::min(j1, n_used) - j0);
        per_period[p] = {ci / count, si / count};
    }

    double i_sum = 0.0;
    double q_sum = 0.0;
    for (std::size_t j = 0; j < n_used; ++j) {
        const double t = static_cast<double>(k0 + j) / fs;
        const double v = x.samples[k0 + j];
        i_sum += v * std::cos(omega * t);
        q_sum += v * std::sin(omega * t);
    }
    const double i_avg = i_sum / static_cast<double>(n_used);
    const double q_avg = q_sum / static_cast<double>(n_used);

    Phasor ph;
    ph.freq = freq;
    ph.amplitude = 2.0 * std::hypot(i_avg, q_avg);
    ph.phase = std::atan2(-q_avg, i_avg);
    if (ph.phase <= -kPi) ph.phase += 2.0 * kPi;

    // Scatter of per-period phasors projected on the mean direction,
    // converted to the uncertainty of the window mean.
    std::complex<double> mean(i_avg, q_avg);
    std::complex<double> dir =
        std::abs(mean) > 0.0 ? mean / std::abs(mean) : std::complex<double>(1, 0);
    double var = 0.0;
    for (const auto& z : per_period) {
        const double proj = std::real((z - mean) * std::conj(dir));
        var += proj * proj;
    }
    if (periods > 1) {
        var /= static_cast<double>(periods - 1);
        ph.sigma_amplitude =
            2.0 * std::sqrt(var / static_cast<double>(periods));
    }
    return ph;
}

namespace {

// Iterative radix-2 complex FFT, in place. n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace

std::vector<std::pair<double, double>>
amplitude_spectral_density(const TimeSeries& x) {
    x.validate();
    constexpr std::size_t kSegment = 1024;
    if (x.samples.size() < kSegment) {
        throw std::invalid_argument(
            "spectral density needs at least 1024 samples");
    }
    const std::size_t hop = kSegment / 2;
    const std::size_t n_segments = (x.samples.size() - kSegment) / hop + 1;

    std::vector<double> window(kSegment);
    double window_power = 0.0;
    for (std::size_t i = 0; i < kSegment; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                          static_cast<double>(kSegment - 1)));
        window_power += window[i] * window[i];
    }

    std::vector<double> psd(kSegment / 2 + 1, 0.0);
    std::vector<std::complex<double>> buf(kSegment);
    for (std::size_t s = 0; s < n_segments; ++s) {
        const double* seg = x.samples.data() + s * hop;
        for (std::size_t i = 0; i < kSegment; ++i) {
            buf[i] = seg[i] * window[i];
        }
        fft_radix2(buf);
        for (std::size_t k = 0; k <= kSegment / 2; ++k) {
            psd[k] += std::norm(buf[k]);
        }
    }
    const double norm = 1.0 / (x.sample_rate * window_power *
                               static_cast<double>(n_segments));
    std::vector<std::pair<double, double>> out(psd.size());
    for (std::size_t k = 0; k < psd.size(); ++k) {
        double p = psd[k] * norm;
        if (k != 0 && k != kSegment / 2) p *= 2.0; // one-sided
        out[k] = {static_cast<double>(k) * x.sample_rate /
                      static_cast<double>(kSegment),
                  std::sqrt(p)};
    }
    return out;
}

void write_timeseries_csv(const std::filesystem::path& path,
                          const TimeSeries& ts) {
    ts.validate();
    std::ofstream out(path);
    if (!out) throw config_error("cannot write file: " + path.string());
    out << "# sample_rate_hz=" << format_double(ts.sample_rate)
        << " unit=" << unit_name(ts.unit) << "\n";
    out << "time_s," << (ts.unit == SignalUnit::meters ? "displacement_m" : "voltage_V")
        << "\n";
    for (std::size_t i = 0; i < ts.samples.size(); ++i) {
        out << format_double(static_cast<double>(i) / ts.sample_rate) << ","
            << format_double(ts.samples[i]) << "\n";
    }
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open file: " + path.string());
    TimeSeries ts;
    std::string line;
    bool have_meta = false;
    bool have_header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto rate_pos = line.find("sample_rate_hz=");
            const auto unit_pos = line.find("unit=");
            if (rate_pos == std::string::npos || unit_pos == std::string::npos) {
                throw config_error(path.string() +
                                   ": header must carry sample_rate_hz and unit");
            }
            const std::string rate_str = line.substr(
                rate_pos + 15, line.find(' ', rate_pos) - (rate_pos + 15));
            ts.sample_rate = parse_double(rate_str, path.string() + " sample rate");
            ts.unit = unit_from_name(line.substr(unit_pos + 5));
            have_meta = true;
            continue;
        }
        if (!have_header) {
            have_header = true; // column names; values carry the data
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw config_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected two columns");
        }
        ts.samples.push_back(parse_double(
            line.substr(comma + 1), path.string() + ":" + std::to_string(lineno)));
    }
    if (!have_meta) {
        throw config_error(path.string() + ": missing metadata header line");
    }
    ts.validate();
    return ts;
}

} // namespace platesim
