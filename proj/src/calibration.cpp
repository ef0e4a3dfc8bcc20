#include "platesim/calibration.hpp"

#include "platesim/constants.hpp"
#include "platesim/dynamics.hpp"
#include "platesim/errors.hpp"
#include "platesim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace platesim {

void BiasSweep::validate() const {
    if (points.size() < 5) {
        throw fit_error("too few points: bias sweep needs at least 5");
    }
    if (!(d0 > 0.0)) {
        throw fit_error("bias sweep separation must be positive");
    }
    std::size_t min_idx = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].amplitude < points[min_idx].amplitude) min_idx = i;
    }
    bool left = false;
    bool right = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].Vg < points[min_idx].Vg) left = true;
        if (points[i].Vg > points[min_idx].Vg) right = true;
    }
    if (!left || !right) {
        throw fit_error(
            "bias sweep needs points on both sides of the amplitude minimum");
    }
}

BiasFitResult fit_residual_bias(const BiasSweep& sweep) {
    sweep.validate();
    const std::size_t n = sweep.points.size();

    // Weighted linear least squares on the basis {1, Vg, Vg^2}.
    double m[9] = {0};
    double rhs[3] = {0};
    bool any_sigma = false;
    for (const auto& pt : sweep.points) {
        if (pt.sigma > 0.0) any_sigma = true;
    }
    for (const auto& pt : sweep.points) {
        const double w =
            (any_sigma && pt.sigma > 0.0) ? 1.0 / (pt.sigma * pt.sigma) : 1.0;
        const double v = pt.Vg;
        const double basis[3] = {1.0, v, v * v};
        for (int a = 0; a < 3; ++a) {
            rhs[a] += w * basis[a] * pt.amplitude;
            for (int b = 0; b < 3; ++b) m[a * 3 + b] += w * basis[a] * basis[b];
        }
    }

    // Solve the 3x3 normal equations by Gaussian elimination with partial
    // pivoting, then reuse the LU factors for the covariance columns.
    auto solve3 = [](double a[9], double b[3], double out[3]) {
        int idx[3] = {0, 1, 2};
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r) {
                if (std::abs(a[idx[r] * 3 + col]) >
                    std::abs(a[idx[piv] * 3 + col])) {
                    piv = r;
                }
            }
            std::swap(idx[col], idx[piv]);
            const double diag = a[idx[col] * 3 + col];
            if (diag == 0.0) return false;
            for (int r = col + 1; r < 3; ++r) {
                const double f = a[idx[r] * 3 + col] / diag;
                for (int c = col; c < 3; ++c) {
                    a[idx[r] * 3 + c] -= f * a[idx[col] * 3 + c];
                }
                b[idx[r]] -= f * b[idx[col]];
            }
        }
        for (int row = 2; row >= 0; --row) {
            double sum = b[idx[row]];
            for (int c = row + 1; c < 3; ++c) sum -= a[idx[row] * 3 + c] * out[c];
            out[row] = sum / a[idx[row] * 3 + row];
        }
        return true;
    };

    double coeffs[3];
    {
        double a_copy[9];
        double b_copy[3];
        std::copy(m, m + 9, a_copy);
        std::copy(rhs, rhs + 3, b_copy);
        if (!solve3(a_copy, b_copy, coeffs)) {
            throw fit_error("degenerate bias sweep: singular normal equations");
        }
    }
    const double c0 = coeffs[0];
    const double c1 = coeffs[1];
    const double c2 = coeffs[2];
    if (!(c2 > 0.0)) {
        throw fit_error("no amplitude minimum in range");
    }

    // Covariance of (c0, c1, c2) = inverse of the normal matrix; scaled by
    // chi2_reduced when the sweep carries no uncertainties.
    double cov[9];
    for (int col = 0; col < 3; ++col) {
        double a_copy[9];
        double e[3] = {0, 0, 0};
        double x[3];
        std::copy(m, m + 9, a_copy);
        e[col] = 1.0;
        if (!solve3(a_copy, e, x)) {
            throw fit_error("degenerate bias sweep: singular normal equations");
        }
        for (int row = 0; row < 3; ++row) cov[row * 3 + col] = x[row];
    }

    double chi2 = 0.0;
    for (const auto& pt : sweep.points) {
        const double w =
            (any_sigma && pt.sigma > 0.0) ? 1.0 / (pt.sigma * pt.sigma) : 1.0;
        const double r = pt.amplitude - (c0 + c1 * pt.Vg + c2 * pt.Vg * pt.Vg);
        chi2 += w * r * r;
    }
    const double chi2_red = chi2 / static_cast<double>(n - 3);
    if (!any_sigma) {
        for (double& c : cov) c *= chi2_red;
    }

    BiasFitResult out;
    out.curvature = c2;
    out.chi2_reduced = chi2_red;
    std::copy(cov, cov + 9, out.covariance.begin());
    // vertex abscissa -c1/(2 c2); the residual bias is its negative.
    out.V0 = c1 / (2.0 * c2);
    const double dV0_dc1 = 1.0 / (2.0 * c2);
    const double dV0_dc2 = -c1 / (2.0 * c2 * c2);
    out.sigma_V0 = std::sqrt(std::max(
        0.0, dV0_dc1 * dV0_dc1 * cov[4] + dV0_dc2 * dV0_dc2 * cov[8] +
                 2.0 * dV0_dc1 * dV0_dc2 * cov[5]));
    return out;
}

void DistanceSweep::validate() const {
    if (points.size() < 5) {
        throw fit_error("too few points: distance sweep needs at least 5");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].z_pzt > points[i - 1].z_pzt)) {
            throw fit_error("distance sweep z values must be strictly monotone");
        }
    }
}

DistanceFitResult fit_reference_distance(const DistanceSweep& sweep,
                                         double stiffness_N_m, double xs0,
                                         double V_eff, double area_S) {
    sweep.validate();
    if (V_eff == 0.0) {
        throw std::invalid_argument("distance calibration requires V_eff != 0");
    }
    if (!(stiffness_N_m > 0.0) || !(xs0 > 0.0) || !(area_S > 0.0)) {
        throw std::invalid_argument(
            "stiffness, xs0 and area must be positive");
    }

    FitData data;
    for (const auto& pt : sweep.points) {
        data.x.push_back(pt.z_pzt);
        data.y.push_back(pt.amplitude);
        data.sigma.push_back(pt.sigma);
    }

    // amplitude^(-1/3) is linear in z: slope = A^(-1/3), intercept = d_r *
    // A^(-1/3). Closed-form starting point for the nonlinear fit.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : sweep.points) {
        if (!(pt.amplitude > 0.0)) {
            throw fit_error("distance sweep amplitudes must be positive");
        }
        const double yi = std::pow(pt.amplitude, -1.0 / 3.0);
        sx += pt.z_pzt;
        sy += yi;
        sxx += pt.z_pzt * pt.z_pzt;
        sxy += pt.z_pzt * yi;
    }
    const double n = static_cast<double>(sweep.points.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    if (!(slope > 0.0)) {
        throw fit_error("distance sweep does not decay with z");
    }
    const double dr0 = intercept / slope;
    const double a0 = 1.0 / (slope * slope * slope);

    FitModel model;
    model.value = [](double z, const std::vector<double>& p) {
        const double g = p[1] + z;
        return p[0] / (g * g * g);
    };
    model.jacobian = [](double z, const std::vector<double>& p,
                        std::vector<double>& out) {
        const double g = p[1] + z;
        const double g3 = g * g * g;
        out[0] = 1.0 / g3;
        out[1] = -3.0 * p[0] / (g3 * g);
    };

    FitOptions opts;
    opts.initial = {a0, dr0};
    FitResult fit = nlls_fit(data, model, opts);
    if (!fit.converged) {
        throw fit_error("distance calibration did not converge: " +
                        fit.diagnostics);
    }
    const double d_r = fit.params[1];
    const double z_min = sweep.points.front().z_pzt;
    if (!(d_r + z_min > 0.0)) {
        throw fit_error("non-physical contact: fitted d_r implies gap <= 0");
    }

    DistanceFitResult out;
    out.d_r = d_r;
    out.sigma_dr = fit.param_sigma(1);
    out.coeff_A = fit.params[0];
    const double expected =
        kConstants.eps0 * area_S * V_eff * V_eff * xs0 / stiffness_N_m;
    out.coeff_ratio = fit.params[0] / expected;
    out.chi2_reduced = fit.chi2_reduced;
    out.fit = std::move(fit);
    return out;
}

double infer_stiffness(double A_V, double V_eff, double d0, double xs0,
                       double area_S) {
    if (!(A_V > 0.0)) {
        throw std::domain_error("amplitude must be positive");
    }
    if (!(d0 > 0.0) || !(xs0 > 0.0) || !(area_S > 0.0) || V_eff == 0.0) {
        throw std::domain_error("inputs must be positive (V_eff nonzero)");
    }
    return kConstants.eps0 * area_S * V_eff * V_eff * xs0 /
           (A_V * d0 * d0 * d0);
}

namespace {

// One demodulated point: true amplitude plus complex Gaussian noise with the
// per-quadrature sigma of a vector average over `duration` seconds.
double noisy_amplitude(double amplitude, double sigma_q, GaussianSampler& g) {
    const double re = amplitude + sigma_q * g();
    const double im = sigma_q * g();
    return std::hypot(re, im);
}

} // namespace

BiasSweep synthesize_bias_sweep(const ApparatusConfig& cfg,
                                const std::vector<double>& vg_values,
                                double duration_per_point,
                                std::uint64_t seed) {
    if (!(duration_per_point > 0.0)) {
        throw std::invalid_argument("duration per point must be positive");
    }
    const double sigma_q = cfg.noise.asd_displacement * cfg.noise.day_factor /
                           std::sqrt(duration_per_point);

    BiasSweep sweep;
    sweep.d0 = cfg.gap.d0;
    GaussianSampler g(derive_seed(seed, "bias-sweep"));
    for (double vg : vg_values) {
        const double v_eff = vg + cfg.gap.V0;
        const ElectrostaticForce force(cfg.plate.area_S, v_eff);
        const double amp = analytic_amplitude(force, cfg.gap, cfg.resonator);
        sweep.points.push_back({vg, noisy_amplitude(amp, sigma_q, g), sigma_q});
    }
    return sweep;
}

std::vector<V0DistanceCheck> check_v0_vs_distance(
    const ApparatusConfig& cfg, const std::vector<double>& distances,
    const std::vector<double>& vg_values, double duration_per_point,
    std::uint64_t seed) {
    std::vector<V0DistanceCheck> out;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        ApparatusConfig at_distance = cfg;
        at_distance.gap.d0 = distances[i];
        const BiasSweep sweep = synthesize_bias_sweep(
            at_distance, vg_values, duration_per_point,
            derive_seed(seed, "v0-vs-distance", i));
        const BiasFitResult fit = fit_residual_bias(sweep);
        out.push_back({distances[i], fit.V0, fit.sigma_V0});
    }
    return out;
}

DistanceSweep synthesize_distance_sweep(const ApparatusConfig& cfg, double d_r,
                                        const std::vector<double>& z_values,
                                        double duration_per_point,
                                        std::uint64_t seed) {
    if (!(duration_per_point > 0.0)) {
        throw std::invalid_argument("duration per point must be positive");
    }
    if (!(d_r > 0.0)) {
        throw std::invalid_argument("reference distance must be positive");
    }
    const double sigma_q = cfg.noise.asd_displacement * cfg.noise.day_factor /
                           std::sqrt(duration_per_point);
    const double v_eff = cfg.gap.Vg + cfg.gap.V0;
    const ElectrostaticForce force(cfg.plate.area_S, v_eff);

    DistanceSweep sweep;
    sweep.Vg = cfg.gap.Vg;
    GaussianSampler g(derive_seed(seed, "distance-sweep"));
    for (double z : z_values) {
        GapState gap = cfg.gap;
        gap.d0 = d_r + z;
        const double amp = analytic_amplitude(force, gap, cfg.resonator);
        sweep.points.push_back({z, noisy_amplitude(amp, sigma_q, g), sigma_q});
    }
    return sweep;
}

} // namespace platesim
