// special_functions.hpp: Bessel and gamma-function helpers used by the
// quasiparticle and echo models.

#pragma once

namespace fluxonium {

/// Modified Bessel function of the second kind, order zero. x > 0.
double bessel_k0(double x);

/// K0(x) * cosh(x), finite for large x where both factors overflow or
/// underflow separately.
double bessel_k0_cosh(double x);

/// K0(x) * sinh(x), same large-x treatment.
double bessel_k0_sinh(double x);

}  // namespace fluxonium
