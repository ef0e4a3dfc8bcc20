#include "platesim/dynamics.hpp"

#include "platesim/constants.hpp"
#include "platesim/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace platesim {

void DriveSpec::validate(const ResonatorParams& res) const {
    if (!model) throw std::invalid_argument("drive has no force model");
    if (!(duration > 0.0)) {
        throw std::invalid_argument("drive duration must be positive");
    }
    const double nyquist_floor = 20.0 * std::max(gap.freq_s, res.freq_r);
    if (!(sample_rate > nyquist_floor)) {
        throw std::invalid_argument(
            "sample rate must exceed 20x the highest system frequency");
    }
    if (!(gap.d0 > 0.0) || !(gap.xs0 >= 0.0) || !(gap.xs0 < gap.d0)) {
        throw std::invalid_argument("gap state violates 0 <= xs0 < d0");
    }
    if (!(gap.freq_s > 0.0)) {
        throw std::invalid_argument("source frequency must be positive");
    }
}

double modulated_force(const ForceModel& model, const GapState& gap, double t) {
    const double d = gap.d0 + gap.xs0 * std::cos(2.0 * kPi * gap.freq_s * t);
    return model.force(d);
}

double settle_time(const ResonatorParams& res) {
    const double omega_r = 2.0 * kPi * res.freq_r;
    return 5.0 * (2.0 * res.quality_Q / omega_r);
}

namespace {

struct OscillatorState {
    double x;
    double v;
};

} // namespace

TimeSeries integrate_motion(const DriveSpec& drive, const ResonatorParams& res) {
    drive.validate(res);
    const double k = stiffness(res);
    const double f0 = modulated_force(*drive.model, drive.gap, 0.0);
    return integrate_motion(drive, res, InitialState{f0 / k, 0.0});
}

TimeSeries integrate_motion(const DriveSpec& drive, const ResonatorParams& res,
                            const InitialState& init) {
    drive.validate(res);

    const double omega_r = 2.0 * kPi * res.freq_r;
    const double gamma = omega_r / res.quality_Q; // velocity damping rate
    const double inv_m = 1.0 / res.mass_m;
    const double omega_sq = omega_r * omega_r;

    // Internal RK4 substeps: at least 40 samples per resonator period.
    const double min_rate = 40.0 * std::max(res.freq_r, drive.gap.freq_s);
    const int substeps = std::max(
        1, static_cast<int>(std::ceil(min_rate / drive.sample_rate)));
    const double dt = 1.0 / (drive.sample_rate * substeps);

    const auto n_out = static_cast<std::size_t>(
        std::floor(drive.duration * drive.sample_rate + 1e-9));
    if (n_out < 2) {
        throw std::invalid_argument("duration too short for the sample rate");
    }

    const ForceModel& model = *drive.model;
    const GapState& gap = drive.gap;
    auto accel = [&](double t, double x, double v) {
        return -omega_sq * x - gamma * v +
               inv_m * modulated_force(model, gap, t);
    };

    TimeSeries out;
    out.sample_rate = drive.sample_rate;
    out.unit = SignalUnit::meters;
    out.samples.reserve(n_out);

    OscillatorState s{init.x0, init.v0};
    const double blowup = 0.5 * gap.d0;
    double t = 0.0;
    for (std::size_t i = 0; i < n_out; ++i) {
        out.samples.push_back(s.x);
        for (int sub = 0; sub < substeps; ++sub) {
            const double k1x = s.v;
            const double k1v = accel(t, s.x, s.v);
            const double k2x = s.v + 0.5 * dt * k1v;
            const double k2v =
                accel(t + 0.5 * dt, s.x + 0.5 * dt * k1x, s.v + 0.5 * dt * k1v);
            const double k3x = s.v + 0.5 * dt * k2v;
            const double k3v =
                accel(t + 0.5 * dt, s.x + 0.5 * dt * k2x, s.v + 0.5 * dt * k2v);
            const double k4x = s.v + dt * k3v;
            const double k4v = accel(t + dt, s.x + dt * k3x, s.v + dt * k3v);
            s.x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            s.v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += dt;
        }
        if (!std::isfinite(s.x) || !std::isfinite(s.v) ||
            std::abs(s.x) > blowup) {
            throw integration_error(
                "integration unstable: displacement grew to the gap scale");
        }
    }
    return out;
}

double analytic_amplitude(const ForceModel& model, const GapState& gap,
                          const ResonatorParams& res) {
    if (!(gap.freq_s < res.freq_r)) {
        throw std::invalid_argument(
            "quasi-static formula requires freq_s < freq_r; "
            "use transfer_gain for the general response");
    }
    if (gap.xs0 == 0.0) return 0.0;
    const double slope = model.force_derivative(gap.d0);
    return std::abs(slope) * gap.xs0 / stiffness(res);
}

std::complex<double> transfer_gain(const ResonatorParams& res, double freq) {
    if (!(freq >= 0.0)) {
        throw std::invalid_argument("frequency must be non-negative");
    }
    const double omega_r = 2.0 * kPi * res.freq_r;
    const double omega = 2.0 * kPi * freq;
    const std::complex<double> denom(omega_r * omega_r - omega * omega,
                                     omega * omega_r / res.quality_Q);
    return omega_r * omega_r / denom;
}

} // namespace platesim
