#include "doctest.h"

#include "fluxonium/constants.hpp"
#include "fluxonium/dephasing.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/sweep.hpp"
#include "oracles/oracles.hpp"

#include <cmath>

using namespace fluxonium;
namespace c = fluxonium::constants;

TEST_CASE("dephasing: echo prefactor matches the filter-function integral") {
    for (double alpha : {0.3, 0.5, 0.62, 1.0, 1.3, 1.8}) {
        const double integral = oracle::echo_filter_integral(alpha);
        CHECK(echo_prefactor(alpha) == doctest::Approx(integral).epsilon(1e-5));
    }
}

TEST_CASE("dephasing: prefactor at alpha = 1 and across the removable point") {
    CHECK(echo_prefactor(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (double eps : {1e-9, 1e-6, 5e-4, 2e-3}) {
        const double lo = echo_prefactor(1.0 - eps), hi = echo_prefactor(1.0 + eps);
        CHECK(lo > echo_prefactor(1.0));
        CHECK(hi < echo_prefactor(1.0));
        CHECK(0.5 * (lo + hi) == doctest::Approx(std::log(2.0)).epsilon(4 * eps * eps + 1e-12));
    }
    CHECK(std::isfinite(echo_prefactor(2.0)));
    CHECK_THROWS_AS(echo_prefactor(0.0), ValidationError);
    CHECK_THROWS_AS(echo_prefactor(3.0), ValidationError);
}

TEST_CASE("dephasing: envelope factors into T1, exponential and power-law parts") {
    const EchoModel m{.a_phi = 6.25e-14, .alpha = 0.62, .t1 = 1e-4, .t_phi_exp = 7.1e-5, .slope = c::two_pi * 2e9};
    for (double t : {1e-6, 1e-5, 5e-5}) {
        const double chi = std::pow(echo_gamma_tilde(m), 2) * std::pow(t, 1.62);
        CHECK(echo_coherence(m, t) == doctest::Approx(chi).epsilon(1e-12));
        CHECK(echo_envelope(m, t) == doctest::Approx(std::exp(-t / 2e-4 - t / 7.1e-5 - chi)).epsilon(1e-12));
    }
}

TEST_CASE("dephasing: trace fit recovers the power-law time") {
    const EchoModel m{.a_phi = 6.25e-14, .alpha = 0.62, .t1 = 1e-4, .t_phi_exp = 7.1e-5, .slope = c::two_pi * 4e9};
    std::vector<double> times, values;
    for (int k = 0; k <= 100; ++k) {
        times.push_back(k * 2e-7);
        values.push_back(0.9 * echo_envelope(m, times.back()) + 0.05);
    }
    const EchoFit f = fit_echo_trace(times, values, m.t1, m.alpha, m.t_phi_exp);
    CHECK(f.gamma_tilde == doctest::Approx(echo_gamma_tilde(m)).epsilon(1e-6));
    CHECK(f.amplitude == doctest::Approx(0.9).epsilon(1e-6));
    const EchoFit free = fit_echo_trace(times, values, m.t1, m.alpha, std::nullopt);
    CHECK(free.t_phi_exp == doctest::Approx(7.1e-5).epsilon(1e-3));
}

TEST_CASE("dephasing: flux-noise amplitude from a slope series") {
    EchoSynthesis s;
    s.truth = {.a_phi = std::pow(0.25e-6, 2), .alpha = 0.62, .t1 = 1e-4, .t_phi_exp = 7.1e-5};
    for (int k = 1; k <= 10; ++k) s.slopes.push_back(c::two_pi * 1.916e9 * k);
    for (int k = 0; k <= 100; ++k) s.times.push_back(k * 2e-7);
    const EchoDataset ds = generate_synthetic_echo(s, 1);
    const EchoExtraction x = extract_flux_noise_from_echo(ds, 0.62, {.t_phi_exp = 7.1e-5});
    CHECK(x.a_phi == doctest::Approx(s.truth.a_phi).epsilon(1e-3));
    CHECK(x.r_squared > 0.9999);

    EchoDataset stored;
    for (const auto& r : ds.records) stored.records.push_back({.slope = r.slope, .gamma_tilde = r.gamma_tilde});
    CHECK(extract_flux_noise_from_echo(stored, 0.62).a_phi == doctest::Approx(s.truth.a_phi).epsilon(1e-9));
}

TEST_CASE("dephasing: spin-locking PSD") {
    const double slope = c::two_pi * 2e9;
    CHECK(spinlock_flux_psd(3e4, 2e4, slope) == doctest::Approx(2 * (3e4 - 1e4) / (slope * slope)).epsilon(1e-14));
    CHECK_THROWS_AS(spinlock_flux_psd(1e3, 4e3, slope), ValidationError);
}
