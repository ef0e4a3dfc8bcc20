#pragma once

// Interferometric readout conversion, displacement-noise synthesis, homodyne
// demodulation with vector averaging, and spectral density estimation.
// All functions are pure; noise generation owns its PRNG state per call.

#include "platesim/config.hpp"
#include "platesim/timeseries.hpp"

#include <utility>
#include <vector>

namespace platesim {

// V = (2 pi / lambda) Vfr x, sample-wise. Valid only in the linear fringe
// regime; throws std::range_error if max |x| >= lambda/20 (fringe wrapping is
// not modeled). Input must carry meters.
TimeSeries displacement_to_voltage(const TimeSeries& x, const ReadoutParams& ro);

// dx = (lambda / 2 pi) V / Vfr, sample-wise. Input must carry volts.
TimeSeries voltage_to_displacement(const TimeSeries& v, const ReadoutParams& ro);

// Adds Gaussian white noise of one-sided amplitude spectral density
// asd_displacement * day_factor. Per-sample std = ASD sqrt(rate/2).
// Deterministic given spec.rng_seed; with zero ASD the input is returned
// bit-exactly.
TimeSeries add_noise(const TimeSeries& x, const NoiseSpec& spec);

// In-phase/quadrature products against cos/sin at `freq`, averaged over an
// integer number of periods starting at t_start. The amplitude uncertainty is
// estimated from the scatter of single-period phasors. Requires at least 10
// full periods in the window.
Phasor demodulate(const TimeSeries& x, double freq, double t_start);

// Welch-averaged one-sided amplitude spectral density (Hann window, 50%
// overlap, 1024-sample segments). White noise of ASD a comes back as a flat
// curve at a. Requires >= 1024 samples. Returns (frequency, asd) pairs.
std::vector<std::pair<double, double>>
amplitude_spectral_density(const TimeSeries& x);

} // namespace platesim
