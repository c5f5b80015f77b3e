// special_functions.cpp

#include "fluxonium/special_functions.hpp"

#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"

#include <cmath>

namespace fluxonium {

namespace {

// sqrt(pi / 2x) * sum_k a_k / x^k, the large-x expansion of K0(x) e^x.
double k0_scaled_asymptotic(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        const double m = 2.0 * k - 1.0;
        term *= -(m * m) / (8.0 * k * x);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::sqrt(constants::pi / (2.0 * x)) * sum;
}

double k0_scaled(double x) {
    if (x > 600.0) return k0_scaled_asymptotic(x);
    return std::cyl_bessel_k(0.0, x) * std::exp(x);
}

}  // namespace

double bessel_k0(double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_k0: argument must be positive");
    return std::cyl_bessel_k(0.0, x);
}

double bessel_k0_cosh(double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_k0_cosh: argument must be positive");
    if (x < 1.0) return std::cyl_bessel_k(0.0, x) * std::cosh(x);
    return 0.5 * k0_scaled(x) * (1.0 + std::exp(-2.0 * x));
}

double bessel_k0_sinh(double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_k0_sinh: argument must be positive");
    if (x < 1.0) return std::cyl_bessel_k(0.0, x) * std::sinh(x);
    return 0.5 * k0_scaled(x) * (-std::expm1(-2.0 * x));
}

}  // namespace fluxonium
