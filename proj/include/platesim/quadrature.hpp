#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature with panel bisection. The
// acceptance test compares the embedded 7-point Gauss estimate against the
// 15-point Kronrod estimate; because the Kronrod value converges much faster
// than that difference, accepted results are usually several orders of
// magnitude more accurate than the requested tolerance.

#include <cmath>
#include <cstdlib>
#include <utility>

namespace platesim {

namespace detail {

// Nodes/weights for the (G7,K15) pair on [-1,1]; positive half, symmetric.
inline constexpr double kKronrodNodes[8] = {
    0.0,
    0.2077849550078984676006894037733,
    0.4058451513773971669066064120770,
    0.5860872354676911302941448382587,
    0.7415311855993944398638647732808,
    0.8648644233597690727897127886409,
    0.9491079123427585245261896840479,
    0.9914553711208126392068546975263,
};
inline constexpr double kKronrodWeights[8] = {
    0.2094821410847278280129991748917,
    0.2044329400752988924141619992346,
    0.1903505780647854099132564024210,
    0.1690047266392679028265834265985,
    0.1406532597155259187451895905102,
    0.1047900103222501838398763225415,
    0.0630920926299785532907006631892,
    0.0229353220105292249637320080590,
};
// Gauss weights attach to Kronrod nodes 1,3,5,7 (even-index Gauss points).
inline constexpr double kGaussWeights[4] = {
    0.4179591836734693877551020408163,
    0.3818300505051189449503697754889,
    0.2797053914892766679014677714238,
    0.1294849661688696932706114326790,
};

template <class F>
std::pair<double, double> gauss_kronrod_15(F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double fk[8];
    fk[0] = f(c);
    double k15 = kKronrodWeights[0] * fk[0];
    double g7 = kGaussWeights[0] * fk[0];
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kKronrodNodes[i];
        const double sum = f(c - dx) + f(c + dx);
        fk[i] = sum;
        k15 += kKronrodWeights[i] * sum;
        if (i % 2 == 0) g7 += kGaussWeights[i / 2] * sum;
    }
    k15 *= h;
    g7 *= h;
    return {k15, std::abs(k15 - g7)};
}

template <class F>
double adapt(F& f, double a, double b, double rel_tol, double floor_scale,
             int depth) {
    auto [value, err] = gauss_kronrod_15(f, a, b);
    if (err <= rel_tol * std::max(std::abs(value), floor_scale) || depth >= 52) {
        return value;
    }
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, rel_tol, 0.5 * floor_scale, depth + 1) +
           adapt(f, mid, b, rel_tol, 0.5 * floor_scale, depth + 1);
}

} // namespace detail

// Integrates f over [a, b] to the given relative tolerance. Intended for
// smooth, single-signed integrands; the `floor_scale` passed down the
// recursion prevents endless refinement of panels whose contribution is
// negligible relative to the whole integral.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    const double rough = detail::gauss_kronrod_15(f, a, b).first;
    const double floor_scale = std::max(std::abs(rough), 1e-300);
    return detail::adapt(f, a, b, rel_tol, floor_scale, 0);
}

} // namespace platesim
