#include "platesim/fitting.hpp"

#include "platesim/constants.hpp"
#include "platesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace platesim {

void FitData::validate(std::size_t n_params) const {
    if (x.size() != y.size() ||
        (!sigma.empty() && sigma.size() != x.size())) {
        throw std::invalid_argument("fit data columns have mismatched lengths");
    }
    if (x.size() < n_params + 1) {
        throw std::invalid_argument("too few points: need at least " +
                                    std::to_string(n_params + 1));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw std::invalid_argument("fit data contains non-finite values");
        }
        if (!sigma.empty() && !(sigma[i] >= 0.0)) {
            throw std::invalid_argument("fit sigmas must be non-negative");
        }
    }
}

double FitResult::param_sigma(std::size_t i) const {
    const std::size_t p = params.size();
    return std::sqrt(std::max(0.0, covariance[i * p + i]));
}

namespace {

// Cholesky solve of a small SPD system; returns false when not positive
// definite.
bool cholesky_solve(std::vector<double> a, std::vector<double> b,
                    std::size_t n, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                sum -= a[i * n + k] * a[j * n + k];
            }
            if (i == j) {
                if (!(sum > 0.0)) return false;
                a[i * n + i] = std::sqrt(sum);
            } else {
                a[i * n + j] = sum / a[j * n + j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a[i * n + k] * b[k];
        b[i] = sum / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= a[k * n + i] * b[k];
        b[i] = sum / a[i * n + i];
    }
    out = std::move(b);
    return true;
}

bool invert_spd(const std::vector<double>& a, std::size_t n,
                std::vector<double>& inv) {
    inv.assign(n * n, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        std::vector<double> x;
        if (!cholesky_solve(a, e, n, x)) return false;
        for (std::size_t row = 0; row < n; ++row) inv[row * n + col] = x[row];
    }
    return true;
}

std::vector<double> clamp_to_bounds(std::vector<double> p,
                                    const std::vector<double>& lo,
                                    const std::vector<double>& hi) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!lo.empty()) p[i] = std::max(p[i], lo[i]);
        if (!hi.empty()) p[i] = std::min(p[i], hi[i]);
    }
    return p;
}

} // namespace

FitResult nlls_fit(const FitData& data, const FitModel& model,
                   const FitOptions& options) {
    const std::size_t np = options.initial.size();
    if (np == 0) throw std::invalid_argument("fit needs at least one parameter");
    data.validate(np);
    if (!options.lower.empty() && options.lower.size() != np) {
        throw std::invalid_argument("lower bounds size mismatch");
    }
    if (!options.upper.empty() && options.upper.size() != np) {
        throw std::invalid_argument("upper bounds size mismatch");
    }
    for (std::size_t i = 0; i < np; ++i) {
        const double lo = options.lower.empty()
                              ? -std::numeric_limits<double>::infinity()
                              : options.lower[i];
        const double hi = options.upper.empty()
                              ? std::numeric_limits<double>::infinity()
                              : options.upper[i];
        if (!(lo <= hi)) throw std::invalid_argument("bounds are inverted");
        if (options.initial[i] < lo || options.initial[i] > hi) {
            throw std::invalid_argument("initial parameters outside bounds");
        }
    }

    const std::size_t n = data.size();
    std::vector<double> weights(n, 1.0);
    bool unit_weights = true;
    if (!data.sigma.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (data.sigma[i] > 0.0) {
                weights[i] = 1.0 / (data.sigma[i] * data.sigma[i]);
                unit_weights = false;
            }
        }
    }

    auto chi2_of = [&](const std::vector<double>& p) {
        double chi2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = data.y[i] - model.value(data.x[i], p);
            chi2 += weights[i] * r * r;
        }
        return chi2;
    };

    auto eval_jacobian = [&](const std::vector<double>& p, std::size_t i,
                             std::vector<double>& row) {
        if (model.jacobian) {
            model.jacobian(data.x[i], p, row);
            return;
        }
        std::vector<double> pp = p;
        for (std::size_t j = 0; j < np; ++j) {
            const double h = std::max(std::abs(p[j]), 1.0) * 1e-7;
            pp[j] = p[j] + h;
            const double fp = model.value(data.x[i], pp);
            pp[j] = p[j] - h;
            const double fm = model.value(data.x[i], pp);
            pp[j] = p[j];
            row[j] = (fp - fm) / (2.0 * h);
        }
    };

    FitResult result;
    std::vector<double> p = options.initial;
    double chi2 = chi2_of(p);
    if (options.record_trace) result.chi2_trace.push_back(chi2);

    double lambda = 0.0; // damping; 0 tries the pure Gauss-Newton step first
    double g0_norm = -1.0;
    std::vector<double> jrow(np);
    std::vector<double> grad(np);
    std::vector<double> hessian(np * np);

    int iter = 0;
    bool converged = false;
    std::string note;
    for (; iter < options.max_iterations; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hessian.begin(), hessian.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = data.y[i] - model.value(data.x[i], p);
            eval_jacobian(p, i, jrow);
            const double w = weights[i];
            for (std::size_t a = 0; a < np; ++a) {
                grad[a] += w * jrow[a] * r;
                for (std::size_t b = a; b < np; ++b) {
                    hessian[a * np + b] += w * jrow[a] * jrow[b];
                }
            }
        }
        for (std::size_t a = 0; a < np; ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                hessian[a * np + b] = hessian[b * np + a];
            }
        }

        double g_norm = 0.0;
        for (double g : grad) g_norm += g * g;
        g_norm = std::sqrt(g_norm);
        if (g0_norm < 0.0) g0_norm = g_norm;
        if (g_norm <= options.gradient_tol * g0_norm || chi2 == 0.0) {
            converged = true;
            break;
        }

        // Inner damping loop: escalate lambda x10 until a step reduces chi2.
        bool stepped = false;
        while (true) {
            std::vector<double> damped = hessian;
            for (std::size_t a = 0; a < np; ++a) {
                damped[a * np + a] += lambda * hessian[a * np + a];
            }
            std::vector<double> delta;
            const bool solvable = cholesky_solve(damped, grad, np, delta);
            if (solvable) {
                std::vector<double> trial(np);
                for (std::size_t a = 0; a < np; ++a) trial[a] = p[a] + delta[a];
                trial = clamp_to_bounds(std::move(trial), options.lower,
                                        options.upper);
                const double trial_chi2 = chi2_of(trial);
                if (trial_chi2 < chi2) {
                    const double drop = chi2 - trial_chi2;
                    p = std::move(trial);
                    chi2 = trial_chi2;
                    lambda = (lambda == 0.0) ? 0.0 : lambda / 10.0;
                    if (lambda < 1e-12) lambda = 0.0;
                    stepped = true;
                    if (options.record_trace) result.chi2_trace.push_back(chi2);
                    // Stationary for practical purposes: the step no longer
                    // moves the objective.
                    if (drop <= 1e-12 * std::max(chi2, 1e-300)) {
                        converged = true;
                    }
                    break;
                }
            }
            const double next = (lambda == 0.0) ? 1e-4 : lambda * 10.0;
            if (next > 1e14) {
                if (!solvable) {
                    throw fit_error(
                        "degenerate fit: normal equations singular after "
                        "damping escalation");
                }
                note = "stalled: no descent step found at maximum damping";
                break;
            }
            lambda = next;
        }
        if (!stepped) {
            // Stationary within arithmetic precision; accept as converged.
            converged = true;
            break;
        }
        if (converged) {
            ++iter;
            break;
        }
    }
    if (iter >= options.max_iterations) {
        note = "iteration cap reached (" +
               std::to_string(options.max_iterations) + ")";
    }

    result.params = p;
    result.chi2 = chi2;
    result.n_iterations = iter;
    result.converged = converged;
    result.diagnostics = note;
    const std::size_t dof = n > np ? n - np : 0;
    result.chi2_reduced = dof > 0 ? chi2 / static_cast<double>(dof) : 0.0;

    // Covariance from the undamped normal equations at the solution. With
    // unit weights the residual variance is estimated from chi2_reduced.
    std::fill(hessian.begin(), hessian.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        eval_jacobian(p, i, jrow);
        for (std::size_t a = 0; a < np; ++a) {
            for (std::size_t b = a; b < np; ++b) {
                hessian[a * np + b] += weights[i] * jrow[a] * jrow[b];
            }
        }
    }
    for (std::size_t a = 0; a < np; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            hessian[a * np + b] = hessian[b * np + a];
        }
    }
    std::vector<double> cov;
    if (invert_spd(hessian, np, cov)) {
        if (unit_weights && dof > 0) {
            for (double& c : cov) c *= result.chi2_reduced;
        }
        result.covariance = std::move(cov);
    } else {
        result.covariance.assign(np * np, 0.0);
        if (result.diagnostics.empty()) {
            result.diagnostics = "covariance unavailable: singular Hessian";
        }
    }
    return result;
}

FitResult fit_power_law(const FitData& data) {
    data.validate(2);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(data.x[i] > 0.0)) {
            throw std::domain_error("power-law fit requires d > 0");
        }
        if (!(data.y[i] > 0.0)) {
            throw std::domain_error(
                "power-law fit requires y > 0 (log-log initialization)");
        }
    }

    // Log-log linear regression for the starting point.
    const std::size_t n = data.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(data.x[i]);
        const double ly = std::log(data.y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) {
        throw fit_error("degenerate fit: all abscissae equal");
    }
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / static_cast<double>(n);

    FitModel model;
    model.value = [](double d, const std::vector<double>& p) {
        return p[0] * std::pow(d, -p[1]);
    };
    model.jacobian = [](double d, const std::vector<double>& p,
                        std::vector<double>& out) {
        const double dn = std::pow(d, -p[1]);
        out[0] = dn;
        out[1] = -p[0] * std::log(d) * dn;
    };

    FitOptions opts;
    opts.initial = {std::exp(intercept), -slope};
    opts.record_trace = true;
    return nlls_fit(data, model, opts);
}

double patch_derivative_magnitude(double d, const std::vector<double>& params,
                                  double lateral_L, double lambda_max) {
    const double sigma_S = params[0];
    const double sigma_L = params[1];
    const double lambda_min = params[2];
    const double k0 = 2.0 * kPi / lambda_max;
    const double k1 = 2.0 * kPi / lambda_min;
    const double pref = kConstants.eps0 * lateral_L * lateral_L;
    double total = sigma_L * sigma_L / (d * d * d);
    if (sigma_S != 0.0) {
        total += 4.0 * sigma_S * sigma_S / (k1 * k1 - k0 * k0) *
                 sinh_cubed_kernel_integral(k0, k1, d);
    }
    return pref * total;
}

FitResult fit_patch_model(const FitData& data, double lateral_L,
                          double lambda_max) {
    data.validate(3);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(data.x[i] > 0.0)) {
            throw std::domain_error("patch fit requires d > 0");
        }
    }
    if (!(lateral_L > 0.0) || !(lambda_max > 0.0)) {
        throw std::invalid_argument("patch fit requires positive L and lambda_max");
    }

    FitModel model;
    model.value = [lateral_L, lambda_max](double d,
                                          const std::vector<double>& p) {
        return patch_derivative_magnitude(d, p, lateral_L, lambda_max);
    };

    const std::vector<double> sigma_starts = {0.02, 0.06, 0.15};
    const std::vector<double> lambda_starts = {1e-6, 3e-6, 8e-6};
    std::vector<std::vector<double>> starts;
    for (double ss : sigma_starts) {
        for (double sl : sigma_starts) {
            for (double lm : lambda_starts) {
                if (lm < lambda_max / 2.0) starts.push_back({ss, sl, lm});
            }
        }
    }

    std::vector<FitResult> results(starts.size());
    std::vector<std::string> failures(starts.size());
    std::vector<char> succeeded(starts.size(), 0);

#pragma omp parallel for schedule(dynamic)
    for (long long si = 0; si < static_cast<long long>(starts.size()); ++si) {
        FitOptions opts;
        opts.initial = starts[si];
        opts.lower = {0.0, 0.0, 0.1e-6};
        opts.upper = {1.0, 1.0, lambda_max / 2.0};
        opts.record_trace = true;
        try {
            results[si] = nlls_fit(data, model, opts);
            succeeded[si] = 1;
        } catch (const std::exception& e) {
            failures[si] = e.what();
        }
    }

    long long best = -1;
    for (std::size_t si = 0; si < starts.size(); ++si) {
        if (!succeeded[si]) continue;
        if (best < 0 || results[si].chi2 < results[best].chi2) {
            best = static_cast<long long>(si);
        }
    }
    if (best < 0) {
        std::string msg = "no convergent start:";
        for (std::size_t si = 0; si < starts.size(); ++si) {
            msg += "\n  start " + std::to_string(si) + ": " + failures[si];
        }
        throw fit_error(msg);
    }
    return results[best];
}

} // namespace platesim
