#include "platesim/forces.hpp"

#include "platesim/constants.hpp"
#include "platesim/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace platesim {

namespace {

void require_gap(double d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw std::domain_error("separation must be positive and finite");
    }
}

// k^3/sinh^2(kd) in the scaled variable u = k d, written with expm1 so it is
// stable from u -> 0 (where it behaves like u) up to arbitrarily large u.
double sinh_sq_integrand(double u) {
    if (u <= 0.0) return 0.0;
    const double em = -std::expm1(-2.0 * u); // 1 - e^{-2u}
    const double e = std::exp(-2.0 * u);
    return 4.0 * u * u * u * e / (em * em);
}

// u^4 cosh(u)/sinh^3(u), same treatment.
double sinh_cubed_integrand(double u) {
    if (u <= 0.0) return 0.0;
    const double em = -std::expm1(-2.0 * u);
    const double e = std::exp(-2.0 * u);
    const double u2 = u * u;
    return 4.0 * u2 * u2 * e * (1.0 + e) / (em * em * em);
}

void require_k_range(double k_min, double k_max) {
    if (!(k_min >= 0.0) || !(k_max >= k_min) || !std::isfinite(k_min)) {
        throw std::domain_error("wave number bounds must satisfy 0 <= k_min <= k_max");
    }
}

} // namespace

double sinh_kernel_integral(double k_min, double k_max, double d) {
    require_k_range(k_min, k_max);
    require_gap(d);
    if (k_min == k_max) return 0.0;
    const double u_lo = k_min * d;
    // The integrand decays like e^{-2u}; mass beyond u_lo + 40 is below
    // e^{-80} of the remaining tail, so the upper limit can be clamped.
    const double u_hi = std::min(k_max * d, std::max(60.0, u_lo + 40.0));
    if (u_hi <= u_lo) return 0.0;
    const double value =
        integrate_adaptive(sinh_sq_integrand, u_lo, u_hi, 1e-8);
    return value / (d * d * d * d);
}

double sinh_cubed_kernel_integral(double k_min, double k_max, double d) {
    require_k_range(k_min, k_max);
    require_gap(d);
    if (k_min == k_max) return 0.0;
    const double u_lo = k_min * d;
    const double u_hi = std::min(k_max * d, std::max(60.0, u_lo + 40.0));
    if (u_hi <= u_lo) return 0.0;
    const double value =
        integrate_adaptive(sinh_cubed_integrand, u_lo, u_hi, 1e-8);
    const double d2 = d * d;
    return value / (d2 * d2 * d);
}

double thermal_wavelength(double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw std::domain_error("temperature must be positive");
    }
    return kConstants.hbar * kConstants.c / (kConstants.kB * temperature);
}

double ForceModel::force(double d) const {
    require_gap(d);
    return force_at(d);
}

double ForceModel::force_derivative(double d) const {
    require_gap(d);
    return derivative_at(d);
}

double PatchParams::k_min() const { return 2.0 * kPi / lambda_max; }
double PatchParams::k_max() const { return 2.0 * kPi / lambda_min; }

void PatchParams::validate() const {
    if (!(sigma_L >= 0.0) || !(sigma_S >= 0.0)) {
        throw std::domain_error("patch rms voltages must be non-negative");
    }
    if (!(lambda_min > 0.0) || !(lambda_min < lambda_max) ||
        !std::isfinite(lambda_max)) {
        throw std::domain_error("patch scales require 0 < lambda_min < lambda_max");
    }
}

CasimirForce::CasimirForce(double area_S) {
    if (!(area_S > 0.0)) {
        throw std::domain_error("plate area must be positive");
    }
    coeff_ = kPi * kPi * kConstants.hbar * kConstants.c * area_S / 240.0;
}

double CasimirForce::force_at(double d) const {
    const double d2 = d * d;
    return -coeff_ / (d2 * d2);
}

double CasimirForce::derivative_at(double d) const {
    const double d2 = d * d;
    return 4.0 * coeff_ / (d2 * d2 * d);
}

ElectrostaticForce::ElectrostaticForce(double area_S, double volts) {
    if (!(area_S > 0.0)) {
        throw std::domain_error("plate area must be positive");
    }
    coeff_ = 0.5 * kConstants.eps0 * area_S * volts * volts;
}

double ElectrostaticForce::force_at(double d) const {
    return -coeff_ / (d * d);
}

double ElectrostaticForce::derivative_at(double d) const {
    return 2.0 * coeff_ / (d * d * d);
}

PowerLawForce::PowerLawForce(double coefficient, double exponent)
    : coeff_(coefficient), expo_(exponent) {
    if (!std::isfinite(coefficient)) {
        throw std::domain_error("power-law coefficient must be finite");
    }
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw std::domain_error("power-law exponent must be positive");
    }
}

double PowerLawForce::force_at(double d) const {
    return -coeff_ * std::pow(d, -expo_);
}

double PowerLawForce::derivative_at(double d) const {
    return expo_ * coeff_ * std::pow(d, -expo_ - 1.0);
}

PatchForce::PatchForce(PatchParams params, double lateral_L)
    : params_(params), lateral_L_(lateral_L) {
    params_.validate();
    if (!(lateral_L > 0.0)) {
        throw std::domain_error("lateral dimension must be positive");
    }
}

double PatchForce::force_at(double d) const {
    const double pref = kConstants.eps0 * lateral_L_ * lateral_L_;
    double total = 0.0;
    if (params_.sigma_L != 0.0) {
        total += params_.sigma_L * params_.sigma_L / (2.0 * d * d);
    }
    if (params_.sigma_S != 0.0) {
        const double k0 = params_.k_min();
        const double k1 = params_.k_max();
        const double norm = 2.0 * params_.sigma_S * params_.sigma_S /
                            (k1 * k1 - k0 * k0);
        total += norm * sinh_kernel_integral(k0, k1, d);
    }
    return -pref * total;
}

double PatchForce::derivative_at(double d) const {
    const double pref = kConstants.eps0 * lateral_L_ * lateral_L_;
    double total = 0.0;
    if (params_.sigma_L != 0.0) {
        total += params_.sigma_L * params_.sigma_L / (d * d * d);
    }
    if (params_.sigma_S != 0.0) {
        const double k0 = params_.k_min();
        const double k1 = params_.k_max();
        const double norm = 4.0 * params_.sigma_S * params_.sigma_S /
                            (k1 * k1 - k0 * k0);
        total += norm * sinh_cubed_kernel_integral(k0, k1, d);
    }
    return pref * total;
}

SumForce::SumForce(std::vector<std::shared_ptr<const ForceModel>> parts)
    : parts_(std::move(parts)) {
    if (parts_.empty()) {
        throw std::domain_error("sum model requires at least one component");
    }
    for (const auto& p : parts_) {
        if (!p) throw std::domain_error("sum model component is null");
    }
}

std::string SumForce::name() const {
    std::string n = "sum(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) n += "+";
        n += parts_[i]->name();
    }
    return n + ")";
}

double SumForce::force_at(double d) const {
    double total = 0.0;
    for (const auto& p : parts_) total += p->force(d);
    return total;
}

double SumForce::derivative_at(double d) const {
    double total = 0.0;
    for (const auto& p : parts_) total += p->force_derivative(d);
    return total;
}

CorrectedForce::CorrectedForce(std::shared_ptr<const ForceModel> inner,
                               CorrectionFn fn, double temperature)
    : inner_(std::move(inner)), fn_(std::move(fn)), temperature_(temperature) {
    if (!inner_) throw std::domain_error("corrected model requires an inner model");
}

std::string CorrectedForce::name() const {
    return "corrected(" + inner_->name() + ")";
}

double CorrectedForce::force_at(double d) const {
    const double factor = fn_ ? fn_(d, temperature_) : 1.0;
    return inner_->force(d) * factor;
}

double CorrectedForce::derivative_at(double d) const {
    if (!fn_) return inner_->force_derivative(d);
    const double factor = fn_(d, temperature_);
    const double h = d * 1e-6;
    const double dfactor =
        (fn_(d + h, temperature_) - fn_(d - h, temperature_)) / (2.0 * h);
    return inner_->force_derivative(d) * factor + inner_->force(d) * dfactor;
}

} // namespace platesim
