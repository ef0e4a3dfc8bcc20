#pragma once

// Force laws between the plates and their spatial derivatives. Sign
// convention: attraction is negative along increasing separation, so every
// model here returns F(d) < 0 and dF/dd > 0 for nonzero parameters.

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace platesim {

// Two-scale patch-potential model: rms voltages of the long- and
// short-wavelength surface components and the crystallite size window
// [lambda_min, lambda_max] bounding the short-scale wave numbers.
struct PatchParams {
    double sigma_L = 0.0;      // [V]
    double sigma_S = 0.0;      // [V]
    double lambda_min = 3e-6;  // [m]
    double lambda_max = 100e-6; // [m]

    double k_min() const; // 2 pi / lambda_max
    double k_max() const; // 2 pi / lambda_min
    void validate() const; // throws std::domain_error on bad parameters
};

class ForceModel {
public:
    virtual ~ForceModel() = default;

    // Signed force [N] at separation d; throws std::domain_error for d <= 0.
    double force(double d) const;
    // dF/dd [N/m]; same domain requirements.
    double force_derivative(double d) const;

    virtual std::string name() const = 0;

protected:
    virtual double force_at(double d) const = 0;
    virtual double derivative_at(double d) const = 0;
};

// F = -pi^2 hbar c S / (240 d^4)
class CasimirForce final : public ForceModel {
public:
    explicit CasimirForce(double area_S);
    std::string name() const override { return "casimir"; }

protected:
    double force_at(double d) const override;
    double derivative_at(double d) const override;

private:
    double coeff_; // pi^2 hbar c S / 240
};

// F = -(1/2) eps0 S (V/d)^2
class ElectrostaticForce final : public ForceModel {
public:
    ElectrostaticForce(double area_S, double volts);
    std::string name() const override { return "electrostatic"; }

protected:
    double force_at(double d) const override;
    double derivative_at(double d) const override;

private:
    double coeff_; // (1/2) eps0 S V^2
};

// F = -C / d^n, n > 0, C finite.
class PowerLawForce final : public ForceModel {
public:
    PowerLawForce(double coefficient, double exponent);
    std::string name() const override { return "powerlaw"; }
    double coefficient() const { return coeff_; }
    double exponent() const { return expo_; }

protected:
    double force_at(double d) const override;
    double derivative_at(double d) const override;

private:
    double coeff_;
    double expo_;
};

// Two-scale patch-potential force:
//   F(d) = -eps0 L^2 [ sigma_L^2/(2 d^2)
//          + 2 sigma_S^2/(k_max^2 - k_min^2) * Int k^3/sinh^2(kd) dk ]
// with the derivative obtained by differentiating under the integral sign.
class PatchForce final : public ForceModel {
public:
    PatchForce(PatchParams params, double lateral_L);
    std::string name() const override { return "patch"; }
    const PatchParams& params() const { return params_; }

protected:
    double force_at(double d) const override;
    double derivative_at(double d) const override;

private:
    PatchParams params_;
    double lateral_L_;
};

// Sum of force models; must be non-empty.
class SumForce final : public ForceModel {
public:
    explicit SumForce(std::vector<std::shared_ptr<const ForceModel>> parts);
    std::string name() const override;

protected:
    double force_at(double d) const override;
    double derivative_at(double d) const override;

private:
    std::vector<std::shared_ptr<const ForceModel>> parts_;
};

// Multiplicative correction hook: wraps a model with a factor f(d, T),
// identity by default. The derivative applies the product rule, with the
// factor's d-slope taken by central finite difference.
class CorrectedForce final : public ForceModel {
public:
    using CorrectionFn = std::function<double(double d, double temperature)>;

    CorrectedForce(std::shared_ptr<const ForceModel> inner, CorrectionFn fn,
                   double temperature = 300.0);
    std::string name() const override;

protected:
    double force_at(double d) const override;
    double derivative_at(double d) const override;

private:
    std::shared_ptr<const ForceModel> inner_;
    CorrectionFn fn_;
    double temperature_;
};

// Integral of k^3 / sinh^2(k d) over [k_min, k_max], adaptive quadrature at
// relative tolerance 1e-8 on the gap-scaled variable u = k d. Monotone
// decreasing in d; equals (3/2) zeta(3) / d^4 in the limit k_min=0,
// k_max -> infinity.
double sinh_kernel_integral(double k_min, double k_max, double d);

// Integral of k^4 cosh(kd) / sinh^3(kd) over [k_min, k_max]; appears in the
// derivative of the patch force.
double sinh_cubed_kernel_integral(double k_min, double k_max, double d);

// lambda_T = hbar c / (kB T); throws std::domain_error for T <= 0.
double thermal_wavelength(double temperature);

} // namespace platesim
