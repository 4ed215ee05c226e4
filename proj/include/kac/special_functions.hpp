#pragma once

#include <cmath>
#include <limits>

#include "kac/errors.hpp"

namespace kac {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// sin(x)/x, stable through x = 0.
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

inline double normal_pdf(double x, double sigma = 1.0) {
    const double z = x / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

// Gamma(1 - beta) for non-integer beta > 0 via the reflection formula;
// negative and finite on (3, 4).
inline double gamma_one_minus(double beta) {
    if (beta == std::floor(beta))
        throw ParameterError("gamma_one_minus: integer beta has a pole");
    return kPi / (std::sin(kPi * beta) * std::tgamma(beta));
}

// max_{x>=0} x^k exp(-a x^2) = [k/(2ea)]^{k/2}
inline double max_power_gaussian(double k, double a) {
    return std::pow(k / (2.0 * std::exp(1.0) * a), k / 2.0);
}

// E|X|^3 for a standard normal times sigma^3.
inline double gaussian_abs_third_moment(double sigma) {
    return sigma * sigma * sigma * 2.0 * std::sqrt(2.0) / std::sqrt(kPi);
}

inline double log10_from_ln(double ln_value) { return ln_value / std::log(10.0); }

}  // namespace kac
