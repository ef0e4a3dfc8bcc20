#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "platesim/constants.hpp"
#include "platesim/dynamics.hpp"
#include "platesim/errors.hpp"
#include "platesim/readout.hpp"
#include "platesim/rng.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

using namespace platesim;

namespace {

struct ConstantForce final : ForceModel {
    double value;
    explicit ConstantForce(double v) : value(v) {}
    std::string name() const override { return "constant"; }

protected:
    double force_at(double) const override { return value; }
    double derivative_at(double) const override { return 0.0; }
};

// Fourier cosine coefficient of f over one period, by fine midpoint rule.
template <class F>
double cosine_coefficient(F&& f, double freq, int harmonics = 1) {
    const double period = 1.0 / freq;
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) * period / n;
        sum += f(t) * std::cos(2.0 * kPi * harmonics * freq * t);
    }
    return 2.0 * sum / n;
}

} // namespace

TEST_CASE("modulated force without modulation is constant") {
    const PowerLawForce pl(1e-27, 4.0);
    GapState gap;
    gap.xs0 = 0.0;
    const double f0 = pl.force(gap.d0);
    for (double t : {0.0, 0.013, 1.7, 42.0}) {
        CHECK(modulated_force(pl, gap, t) == f0);
    }
}

TEST_CASE("modulated force at t=0 evaluates at d0 + xs0") {
    const PowerLawForce pl(2.5e-28, 3.0);
    GapState gap;
    CHECK(modulated_force(pl, gap, 0.0) ==
          doctest::Approx(-2.5e-28 / std::pow(gap.d0 + gap.xs0, 3.0))
              .epsilon(1e-14));
}

TEST_CASE("first-order Fourier coefficient of the exact modulated force") {
    // F(t) = -C/(d0 + xs0 cos wt)^n; the cos(wt) coefficient is
    // n C xs0/d0^(n+1) (1 + (n+1)(n+2)/8 eps^2 + ...). The tolerance below is
    // the derived next-order term with 25% headroom.
    GapState gap;
    for (double n : {2.0, 3.0, 4.0, 5.0}) {
        const double C = 1e-10 * std::pow(gap.d0, n);
        const PowerLawForce pl(C, n);
        const double coeff = cosine_coefficient(
            [&](double t) { return modulated_force(pl, gap, t); }, gap.freq_s);
        const double first_order = n * C * gap.xs0 / std::pow(gap.d0, n + 1.0);
        const double eps = gap.xs0 / gap.d0;
        const double tol = 1.25 * (n + 1.0) * (n + 2.0) / 8.0 * eps * eps;
        CHECK(std::abs(coeff - first_order) <= tol * first_order);
    }
}

TEST_CASE("zero force from rest stays at rest") {
    DriveSpec drive;
    drive.gap = GapState{};
    drive.model = std::make_shared<PowerLawForce>(0.0, 4.0);
    drive.duration = 0.5;
    drive.sample_rate = 4000.0;
    const TimeSeries x = integrate_motion(drive, ResonatorParams{});
    for (double v : x.samples) CHECK(v == 0.0);
}

TEST_CASE("constant force gives the static spring offset") {
    const ResonatorParams res;
    const double f0 = -3e-10;
    DriveSpec drive;
    drive.gap = GapState{};
    drive.gap.xs0 = 0.0;
    drive.model = std::make_shared<ConstantForce>(f0);
    drive.duration = 0.5;
    drive.sample_rate = 4000.0;
    const TimeSeries x = integrate_motion(drive, res);
    const double expected = f0 / stiffness(res);
    for (double v : x.samples) {
        CHECK(v == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("Casimir drive amplitude matches the analytic prediction within 1%") {
    ApparatusConfig cfg;
    cfg.resonator.quality_Q = 300.0; // shortens the transient, keeps nu_s << nu_r
    DriveSpec drive;
    drive.gap = cfg.gap;
    drive.model = std::make_shared<CasimirForce>(cfg.plate.area_S);
    drive.sample_rate = 4000.0;
    const double t_settle = settle_time(cfg.resonator);
    drive.duration = t_settle + 2.0;

    const TimeSeries x = integrate_motion(drive, cfg.resonator);
    const Phasor ph = demodulate(x, cfg.gap.freq_s, t_settle);
    const double expected =
        analytic_amplitude(*drive.model, cfg.gap, cfg.resonator) *
        std::abs(transfer_gain(cfg.resonator, cfg.gap.freq_s));
    CHECK(ph.amplitude == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("analytic amplitude examples") {
    const ApparatusConfig cfg;
    const ElectrostaticForce electro(cfg.plate.area_S, 0.1);
    CHECK(analytic_amplitude(electro, cfg.gap, cfg.resonator) ==
          doctest::Approx(4.4e-10).epsilon(0.02));

    const CasimirForce casimir(cfg.plate.area_S);
    CHECK(analytic_amplitude(casimir, cfg.gap, cfg.resonator) ==
          doctest::Approx(1.0e-12).epsilon(0.05));

    GapState still = cfg.gap;
    still.xs0 = 0.0;
    CHECK(analytic_amplitude(electro, still, cfg.resonator) == 0.0);

    GapState fast = cfg.gap;
    fast.freq_s = 200.0; // above nu_r
    CHECK_THROWS_AS(analytic_amplitude(electro, fast, cfg.resonator),
                    std::invalid_argument);
}

TEST_CASE("transfer gain limits") {
    const ResonatorParams res;
    CHECK(std::abs(transfer_gain(res, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(transfer_gain(res, res.freq_r)) ==
          doctest::Approx(res.quality_Q).epsilon(1e-12));
    CHECK(std::abs(transfer_gain(res, 10.0)) ==
          doctest::Approx(1.006441).epsilon(1e-4));
}

TEST_CASE("Casimir/electrostatic amplitude quotient is pi^2 hbar c / (60 eps0 V^2 d0^2)") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        ApparatusConfig cfg;
        cfg.plate.area_S = 1e-5 + 9e-4 * uni(rng);
        cfg.resonator.mass_m = 1e-6 + 1e-4 * uni(rng);
        cfg.resonator.freq_r = 50.0 + 300.0 * uni(rng);
        cfg.gap.d0 = 1e-6 + 2e-5 * uni(rng);
        cfg.gap.xs0 = 0.001 * cfg.gap.d0 * (1.0 + uni(rng));
        const double volts = 0.05 + uni(rng);

        const CasimirForce casimir(cfg.plate.area_S);
        const ElectrostaticForce electro(cfg.plate.area_S, volts);
        const double ratio =
            analytic_amplitude(casimir, cfg.gap, cfg.resonator) /
            analytic_amplitude(electro, cfg.gap, cfg.resonator);
        const double expected = kPi * kPi * kConstants.hbar * kConstants.c /
                                (60.0 * kConstants.eps0 * volts * volts *
                                 cfg.gap.d0 * cfg.gap.d0);
        CHECK(std::abs(ratio - expected) <= 1e-12 * expected);
    }
}

TEST_CASE("time-domain amplitude equals analytic amplitude x transfer gain") {
    // One exponent here; the acceptance suite covers the full matrix.
    ApparatusConfig cfg;
    cfg.resonator.quality_Q = 300.0;
    cfg.gap.xs0 = 0.02 * cfg.gap.d0;
    const double n = 3.0;
    const double C = 1e-10 * std::pow(cfg.gap.d0, n);

    DriveSpec drive;
    drive.gap = cfg.gap;
    drive.model = std::make_shared<PowerLawForce>(C, n);
    drive.sample_rate = 4000.0;
    const double t_settle = settle_time(cfg.resonator);
    drive.duration = t_settle + 2.0;

    const TimeSeries x = integrate_motion(drive, cfg.resonator);
    const Phasor ph = demodulate(x, cfg.gap.freq_s, t_settle);
    const double expected =
        analytic_amplitude(*drive.model, cfg.gap, cfg.resonator) *
        std::abs(transfer_gain(cfg.resonator, cfg.gap.freq_s));
    CHECK(ph.amplitude == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("second harmonic amplitude ratio is (n+1) xs0 / (4 d0)") {
    ApparatusConfig cfg;
    cfg.resonator.quality_Q = 300.0;
    cfg.gap.xs0 = 0.02 * cfg.gap.d0;
    const double n = 4.0;
    const double C = 1e-10 * std::pow(cfg.gap.d0, n);

    DriveSpec drive;
    drive.gap = cfg.gap;
    drive.model = std::make_shared<PowerLawForce>(C, n);
    drive.sample_rate = 4000.0;
    const double t_settle = settle_time(cfg.resonator);
    drive.duration = t_settle + 3.0;

    const TimeSeries x = integrate_motion(drive, cfg.resonator);
    const Phasor first = demodulate(x, cfg.gap.freq_s, t_settle);
    const Phasor second = demodulate(x, 2.0 * cfg.gap.freq_s, t_settle);
    const double expected = (n + 1.0) * cfg.gap.xs0 / (4.0 * cfg.gap.d0);
    CHECK(second.amplitude / first.amplitude ==
          doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("free decay time constant is 2Q/w_r") {
    ResonatorParams res;
    res.quality_Q = 50.0;
    DriveSpec drive;
    drive.gap = GapState{};
    drive.model = std::make_shared<PowerLawForce>(0.0, 4.0);
    drive.duration = 0.6;
    drive.sample_rate = 5000.0;
    const TimeSeries x =
        integrate_motion(drive, res, InitialState{1e-9, 0.0});

    // log-linear fit of the |x| peak envelope
    std::vector<double> t_peaks, ln_peaks;
    for (std::size_t i = 1; i + 1 < x.samples.size(); ++i) {
        const double a = std::abs(x.samples[i]);
        if (a > std::abs(x.samples[i - 1]) && a >= std::abs(x.samples[i + 1]) &&
            a > 1e-12) {
            t_peaks.push_back(static_cast<double>(i) / x.sample_rate);
            ln_peaks.push_back(std::log(a));
        }
    }
    REQUIRE(t_peaks.size() > 20);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(t_peaks.size());
    for (std::size_t i = 0; i < t_peaks.size(); ++i) {
        sx += t_peaks[i];
        sy += ln_peaks[i];
        sxx += t_peaks[i] * t_peaks[i];
        sxy += t_peaks[i] * ln_peaks[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double tau_fit = -1.0 / slope;
    const double tau = 2.0 * res.quality_Q / (2.0 * kPi * res.freq_r);
    CHECK(tau_fit == doctest::Approx(tau).epsilon(0.05));
}

TEST_CASE("halving the integration step leaves the demodulated amplitude unchanged") {
    ApparatusConfig cfg;
    cfg.resonator.quality_Q = 100.0;
    DriveSpec drive;
    drive.gap = cfg.gap;
    drive.model = std::make_shared<PowerLawForce>(
        1e-10 * std::pow(cfg.gap.d0, 4.0), 4.0);
    const double t_settle = settle_time(cfg.resonator);
    drive.duration = t_settle + 2.0;

    drive.sample_rate = 4000.0; // internal step 1/8000 s
    const Phasor coarse = demodulate(integrate_motion(drive, cfg.resonator),
                                     cfg.gap.freq_s, t_settle);
    drive.sample_rate = 8000.0; // internal step 1/16000 s
    const Phasor fine = demodulate(integrate_motion(drive, cfg.resonator),
                                   cfg.gap.freq_s, t_settle);
    CHECK(std::abs(coarse.amplitude - fine.amplitude) <=
          1e-4 * fine.amplitude);
}

TEST_CASE("a force driving the resonator to the gap scale aborts integration") {
    ApparatusConfig cfg;
    cfg.resonator.quality_Q = 100.0;
    DriveSpec drive;
    drive.gap = cfg.gap;
    // 100 V across 5 um: the static deflection alone dwarfs the gap
    drive.model = std::make_shared<ElectrostaticForce>(cfg.plate.area_S, 100.0);
    drive.duration = 1.0;
    drive.sample_rate = 4000.0;
    CHECK_THROWS_AS(
        integrate_motion(drive, cfg.resonator, InitialState{0.0, 0.0}),
        integration_error);
}

TEST_CASE("drive validation rejects bad specs") {
    DriveSpec drive;
    drive.gap = GapState{};
    drive.model = std::make_shared<CasimirForce>(1e-4);
    drive.duration = 1.0;
    drive.sample_rate = 1000.0; // below 20 * nu_r
    CHECK_THROWS_AS(integrate_motion(drive, ResonatorParams{}),
                    std::invalid_argument);
    drive.sample_rate = 4000.0;
    drive.duration = -1.0;
    CHECK_THROWS_AS(integrate_motion(drive, ResonatorParams{}),
                    std::invalid_argument);
}
