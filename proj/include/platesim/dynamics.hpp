#pragma once

// Resonator response to a distance-modulated force: exact time-domain
// integration of the equation of motion and the analytic small-signal
// amplitude predictions it is tested against.

#include "platesim/config.hpp"
#include "platesim/forces.hpp"
#include "platesim/timeseries.hpp"

#include <complex>
#include <memory>

namespace platesim {

struct DriveSpec {
    GapState gap;
    std::shared_ptr<const ForceModel> model;
    double duration = 60.0;     // [s]
    double sample_rate = 4000.0; // [Hz]; must exceed 20 max(freq_s, freq_r)

    void validate(const ResonatorParams& res) const;
};

struct InitialState {
    double x0 = 0.0; // [m]
    double v0 = 0.0; // [m/s]
};

// Force at the exact instantaneous gap d0 + xs0 cos(2 pi freq_s t). Not the
// first-order truncation: the small-signal formula is a testable
// approximation of this function, not an assumption of it.
double modulated_force(const ForceModel& model, const GapState& gap, double t);

// Solves m x'' = -m w_r^2 x - (m w_r / Q) x' + F(d0 + xs(t)) with fixed-step
// RK4, starting at rest at the equilibrium of the t=0 force. Output is the
// resonator displacement sampled at drive.sample_rate. Throws
// integration_error on instability (non-finite state or displacement
// comparable to the gap).
TimeSeries integrate_motion(const DriveSpec& drive, const ResonatorParams& res);
TimeSeries integrate_motion(const DriveSpec& drive, const ResonatorParams& res,
                            const InitialState& init);

// Quasi-static first-order amplitude |dF/dd|(d0) xs0 / (m w_r^2). For a pure
// power law C/d^n this is exactly n C xs0 / (m w_r^2 d0^(n+1)). Requires
// freq_s < freq_r; use transfer_gain to correct at finite frequency.
double analytic_amplitude(const ForceModel& model, const GapState& gap,
                          const ResonatorParams& res);

// Damped-oscillator response w_r^2 / (w_r^2 - w^2 + i w w_r / Q);
// |gain| -> 1 as w -> 0 and |gain| = Q on resonance.
std::complex<double> transfer_gain(const ResonatorParams& res, double freq);

// Settling time discarded before demodulation: 5 amplitude time constants.
double settle_time(const ResonatorParams& res);

} // namespace platesim
