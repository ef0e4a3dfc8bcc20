#pragma once

// Weighted nonlinear least squares: a damped Gauss-Newton core (Levenberg
// damping schedule, x10 up on rejected steps, /10 on accepted ones) plus the
// two science fits built on it, the A/d^n power law and the patch
// force-derivative model.

#include "platesim/forces.hpp"

#include <functional>
#include <string>
#include <vector>

namespace platesim {

struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma; // empty or zeros -> unit weights

    std::size_t size() const { return x.size(); }
    void validate(std::size_t n_params) const;
};

struct FitModel {
    // value(x, params)
    std::function<double(double, const std::vector<double>&)> value;
    // jacobian(x, params, out_dvalue_dparam); optional, finite differences
    // with step max(|p|,1)*1e-7 otherwise.
    std::function<void(double, const std::vector<double>&, std::vector<double>&)>
        jacobian;
};

struct FitOptions {
    std::vector<double> initial;
    std::vector<double> lower; // empty -> unbounded
    std::vector<double> upper;
    int max_iterations = 200;
    double gradient_tol = 1e-10; // relative to the initial gradient norm
    bool record_trace = false;
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> covariance; // row-major p x p
    double chi2 = 0.0;
    double chi2_reduced = 0.0;
    bool converged = false;
    int n_iterations = 0;
    std::string diagnostics;
    std::vector<double> chi2_trace; // chi2 after each accepted step

    double param_sigma(std::size_t i) const;
};

// Damped Gauss-Newton iteration to a stationary point. Throws fit_error when
// the normal equations stay singular through the damping escalation
// ("degenerate fit"); hitting the iteration cap returns converged=false with
// diagnostics instead.
FitResult nlls_fit(const FitData& data, const FitModel& model,
                   const FitOptions& options);

// y = A / d^n over (A, n), initialized from a log-log linear regression.
// Requires every x > 0 and y > 0.
FitResult fit_power_law(const FitData& data);

// y = |dF/dd| of the two-scale patch force over (sigma_S, sigma_L,
// lambda_min); L and lambda_max are fixed inputs. Multi-start over a coarse
// parameter grid, each start refined by nlls_fit, best chi2 wins. Bounds:
// sigma in [0, 1] V, lambda_min in [0.1 um, lambda_max/2].
FitResult fit_patch_model(const FitData& data, double lateral_L,
                          double lambda_max);

// Model function used by fit_patch_model; exposed for synthetic data
// generation and reporting. params = (sigma_S, sigma_L, lambda_min).
double patch_derivative_magnitude(double d, const std::vector<double>& params,
                                  double lateral_L, double lambda_max);

} // namespace platesim
