#include "doctest.h"

#include "fluxonium/config.hpp"
#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/field.hpp"
#include "fluxonium/fitting.hpp"
#include "fluxonium/sweep.hpp"

#include <cmath>
#include <random>

using namespace fluxonium;
namespace c = fluxonium::constants;

namespace {

const CircuitParams qubit{0.957e9, 6.814e9, 0.560e9, 0.0};

RunConfig composite_config(LevelMode mode, int points = 30) {
    RunConfig cfg = baseline_config();
    cfg.channels = {FluxNoise{.a_phi = std::pow(0.23e-6, 2), .alpha = 0.62, .t_bath = 0.05},
                    Dielectric{.tan_delta0 = 4e-6, .epsilon = 0.31, .t_eff = 0.05}};
    cfg.free = {{.channel = 0, .field = "a_phi"}, {.channel = 1, .field = "tan_delta0"}};
    cfg.level_mode = mode;
    cfg.flux_grid.clear();
    for (int i = 0; i < points; ++i) cfg.flux_grid.push_back(0.5 * i / (points - 1));
    return cfg;
}

CompositeFitSpec start_away(const RunConfig& cfg) {
    CompositeFitSpec spec = fit_spec(cfg);
    set_channel_parameter(spec.channels[0], "a_phi", 2e-13);
    set_channel_parameter(spec.channels[1], "tan_delta0", 1e-5);
    return spec;
}

}  // namespace

TEST_CASE("fitting: exponential fit of an exact decay") {
    std::vector<double> t, y;
    for (int k = 0; k < 50; ++k) {
        t.push_back(k * 4e-6);
        y.push_back(0.8 * std::exp(-t.back() / 3e-5) + 0.1);
    }
    const ExponentialFit f = fit_exponential(t, y);
    CHECK(f.t1 == doctest::Approx(3e-5).epsilon(1e-8));
    CHECK(f.a == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(f.c == doctest::Approx(0.1).epsilon(1e-8));
    CHECK_FALSE(f.rejected);
}

TEST_CASE("fitting: a flat trace is rejected") {
    std::vector<double> t, y;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1e-3);
    for (int k = 0; k < 40; ++k) {
        t.push_back(k * 1e-6);
        y.push_back(0.5 + n(rng));
    }
    CHECK(fit_exponential(t, y).rejected);
}

TEST_CASE("fitting: noisy exponentials land within 3 sigma of the truth") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 0.05);
    int within = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> t, y;
        for (int k = 0; k < 60; ++k) {
            t.push_back(k * 2e-6);
            y.push_back(std::exp(-t.back() / 2e-5) + n(rng));
        }
        const ExponentialFit f = fit_exponential(t, y);
        if (std::abs(f.t1 - 2e-5) <= 3 * f.sigma_t1) ++within;
    }
    CHECK(within >= 190);
}

TEST_CASE("fitting: composite fit recovers generator parameters") {
    for (LevelMode mode : {LevelMode::two, LevelMode::n}) {
        const RunConfig cfg = composite_config(mode);
        const T1Dataset ds = generate_synthetic(cfg, 0.0, 1);
        const FitResult f = fit_t1_composite(ds, start_away(cfg));
        CHECK(f.value("flux_noise.a_phi") == doctest::Approx(std::pow(0.23e-6, 2)).epsilon(1e-6));
        CHECK(f.value("dielectric.tan_delta0") == doctest::Approx(4e-6).epsilon(1e-6));
        CHECK(f.converged);
    }
}

TEST_CASE("fitting: absent dielectric loss gives a tan delta interval at zero") {
    RunConfig cfg = composite_config(LevelMode::two);
    std::get<Dielectric>(cfg.channels[1]).tan_delta0 = 0.0;
    // Keep a weak floor so that T1 stays finite at integer flux.
    cfg.channels.push_back(QpJunction{.x_qp = 1e-7, .t = 0.05});
    const T1Dataset ds = generate_synthetic(cfg, 0.03, 7);
    CompositeFitSpec spec = start_away(cfg);
    spec.free[1].log_scale = false;
    const FitResult f = fit_t1_composite(ds, spec);
    const double v = f.value("dielectric.tan_delta0");
    CHECK(v - 2 * f.sigma("dielectric.tan_delta0") <= 1e-9);
}

TEST_CASE("fitting: two-level fit of N-level data biases tan delta upward") {
    RunConfig cfg = composite_config(LevelMode::n, 24);
    cfg.flux_grid.clear();
    for (int i = 0; i < 24; ++i) cfg.flux_grid.push_back(0.15 + 0.25 * i / 23.0);
    const T1Dataset ds = generate_synthetic(cfg, 0.0, 1);
    CompositeFitSpec two = start_away(cfg);
    two.level_mode = LevelMode::two;
    const FitResult f = fit_t1_composite(ds, two);
    CHECK(f.value("dielectric.tan_delta0") > 4e-6);
}

TEST_CASE("fitting: composite fit is invariant to record order and sigma scale") {
    const RunConfig cfg = composite_config(LevelMode::two);
    T1Dataset ds = generate_synthetic(cfg, 0.05, 2);
    const FitResult a = fit_t1_composite(ds, start_away(cfg));
    std::reverse(ds.records.begin(), ds.records.end());
    const FitResult b = fit_t1_composite(ds, start_away(cfg));
    CHECK(b.values[0] == doctest::Approx(a.values[0]).epsilon(1e-6));
    CHECK(b.values[1] == doctest::Approx(a.values[1]).epsilon(1e-6));
    for (auto& r : ds.records) r.sigma *= 3.0;
    const FitResult s = fit_t1_composite(ds, start_away(cfg));
    CHECK(s.values[0] == doctest::Approx(a.values[0]).epsilon(1e-6));
    CHECK(s.sigmas[0] == doctest::Approx(3.0 * a.sigmas[0]).epsilon(1e-3));
}

TEST_CASE("fitting: degenerate composite parameters are named") {
    RunConfig cfg = composite_config(LevelMode::two);
    cfg.channels.push_back(Dielectric{.tan_delta0 = 1e-6, .epsilon = 0.31, .t_eff = 0.05});
    cfg.free.push_back({.channel = 2, .field = "tan_delta0"});
    const T1Dataset ds = generate_synthetic(cfg, 0.0, 1);
    try {
        (void)fit_t1_composite(ds, fit_spec(cfg));
        FAIL("expected a degeneracy error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("tan_delta0") != std::string::npos);
    }
}

TEST_CASE("fitting: bootstrap is deterministic and collapses on exact data") {
    const RunConfig cfg = composite_config(LevelMode::two, 20);
    const T1Dataset noisy = generate_synthetic(cfg, 0.05, 4);
    const FitResult a = bootstrap_confidence(noisy, start_away(cfg), 100, 9);
    const FitResult b = bootstrap_confidence(noisy, start_away(cfg), 100, 9);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
    CHECK(a.values == b.values);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        CHECK(a.ci_low[k] <= a.values[k]);
        CHECK(a.values[k] <= a.ci_high[k]);
    }
    const T1Dataset exact = generate_synthetic(cfg, 0.0, 4);
    const FitResult z = bootstrap_confidence(exact, start_away(cfg), 100, 9);
    for (std::size_t k = 0; k < z.values.size(); ++k) CHECK((z.ci_high[k] - z.ci_low[k]) / z.values[k] < 1e-6);
    CHECK_THROWS_AS(bootstrap_confidence(noisy, start_away(cfg), 50, 9), ValidationError);
}

TEST_CASE("fitting: normalized-rate exponent of 1/f flux noise") {
    std::vector<NormalizedRatePoint> d;
    for (int i = 0; i < 30; ++i) {
        const EigenSolution sol = diagonalize(qubit.at_flux(0.5 - 0.45 * i / 29.0), 2);
        const double g = gamma1_two_level({FluxNoise{.a_phi = 1e-12, .alpha = 1.0}}, sol).gamma1;
        const double n = sol.magnitude(Operator::n, 0, 1);
        d.push_back({sol.frequency(0, 1), g / (n * n), 0.0});
    }
    const NormalizedRateFit f = fit_normalized_rate(d);
    CHECK(f.mu == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("fitting: a white-noise dominated rate takes the C = 0 path only when C is unresolved") {
    std::vector<NormalizedRatePoint> d;
    for (int i = 0; i < 12; ++i) {
        const double f = 0.1e9 * (i + 1);
        d.push_back({f, 2.0 / std::pow(f * 1e-9, 1.2), 0.0});
    }
    CHECK(fit_normalized_rate(d).c_constrained);
    for (auto& p : d) p.rate += 50.0;
    const NormalizedRateFit w = fit_normalized_rate(d);
    CHECK_FALSE(w.c_constrained);
    CHECK(w.c == doctest::Approx(50.0).epsilon(1e-6));
    CHECK(w.mu == doctest::Approx(1.2).epsilon(1e-6));
}

TEST_CASE("fitting: global power law recovers all exponents") {
    PhenomPowerLaw truth{.a = 1.0, .alpha = 1.5, .beta1 = 0.32, .b = 1.0, .gamma = 0.19, .beta2 = 2.9};
    const double w0 = c::two_pi * 1e9, t0 = 0.05;
    truth.a = 1e3 / phenom_normalized_rate({.a = 1.0, .alpha = 1.5, .beta1 = 0.32}, qubit, w0, t0);
    truth.b = 1e3 / phenom_normalized_rate({.b = 1.0, .gamma = 0.19, .beta2 = 2.9}, qubit, w0, t0);
    std::vector<PowerLawPoint> pts;
    for (double t : {0.02, 0.05, 0.08, 0.11})
        for (int i = 0; i < 12; ++i) {
            const double w = diagonalize(qubit.at_flux(0.05 + 0.4 * i / 11.0), 2).angular_frequency(0, 1);
            pts.push_back({w, t, phenom_normalized_rate(truth, qubit, w, t), 0.0});
        }
    const PowerLawFit f = fit_power_law_global(pts, qubit, {.alpha = 1.0, .beta2 = 2.0});
    CHECK(f.params.alpha == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(f.params.beta1 == doctest::Approx(0.32).epsilon(1e-6));
    CHECK(f.params.gamma == doctest::Approx(0.19).epsilon(1e-6));
    CHECK(f.params.beta2 == doctest::Approx(2.9).epsilon(1e-6));
    CHECK(f.params.a == doctest::Approx(truth.a).epsilon(1e-5));
    CHECK(f.params.b == doctest::Approx(truth.b).epsilon(1e-5));

    // Temperature-flat charge term.
    PhenomPowerLaw flat = truth;
    flat.beta2 = 0.0;
    for (auto& p : pts) p.rate = phenom_normalized_rate(flat, qubit, p.omega, p.t);
    CHECK(std::abs(fit_power_law_global(pts, qubit, {.alpha = 1.0, .beta2 = 1.0}).params.beta2) < 1e-6);
}

TEST_CASE("fitting: field models") {
    const FieldModelParams fm{.ej0 = 6.814e9, .b_delta = 2.2, .b_phi0 = 857.0, .b_c = 487.0};
    std::vector<FieldPoint> pts;
    for (int i = 0; i <= 20; ++i) pts.push_back({5.0 * i, fraunhofer_ej(fm, 5.0 * i), 0.0});
    const FieldFits f = fit_field_models(pts);
    CHECK(f.fraunhofer.b_phi0 == doctest::Approx(857.0).epsilon(1e-6));
    CHECK(f.fraunhofer.b_delta == doctest::Approx(2.2).epsilon(1e-5));
    CHECK(f.ginzburg_landau.b_c == doctest::Approx(487.0).epsilon(0.1));
    CHECK(junction_length(f.fraunhofer.b_phi0, 50e-9, 1e-9) == doctest::Approx(240e-9).epsilon(0.05));

    FieldModelParams sym = fm;
    sym.b_delta = 0.0;
    for (auto& p : pts) p.e_j = fraunhofer_ej(sym, p.b);
    CHECK(std::abs(fit_field_models(pts).fraunhofer.b_delta) < 1e-6);
}

TEST_CASE("fitting: spectroscopy recovers the circuit energies") {
    std::vector<TransitionPoint> pts;
    for (double flux : {0.5, 0.45, 0.4, 0.3, 0.2, 0.1}) {
        const EigenSolution sol = diagonalize(qubit.at_flux(flux), 4);
        pts.push_back({flux, 0, 1, sol.frequency(0, 1), 1e6});
        pts.push_back({flux, 0, 2, sol.frequency(0, 2), 1e6});
    }
    SpectroscopyFitOptions opts;
    opts.guess = {1.0e9, 6.5e9, 0.6e9, 0.0};
    const SpectroscopyFit f = fit_hamiltonian_spectroscopy(pts, opts);
    CHECK(f.params.e_c == doctest::Approx(qubit.e_c).epsilon(5e-3));
    CHECK(f.params.e_j == doctest::Approx(qubit.e_j).epsilon(5e-3));
    CHECK(f.params.e_l == doctest::Approx(qubit.e_l).epsilon(5e-3));

    opts.guess.e_c = qubit.e_c;
    opts.fix_e_c = true;
    const SpectroscopyFit fixed = fit_hamiltonian_spectroscopy(pts, opts);
    CHECK(fixed.params.e_c == qubit.e_c);
    CHECK(fixed.params.e_j == doctest::Approx(qubit.e_j).epsilon(1e-4));

    const std::vector<TransitionPoint> single{{0.5, 0, 1, 51.18e6, 1e6}, {0.5, 0, 1, 51.19e6, 1e6}};
    CHECK_THROWS_AS(fit_hamiltonian_spectroscopy(single, opts), ValidationError);
}

TEST_CASE("fitting: effective temperature") {
    const double t = 0.05, f = 52e6;
    const double ratio = std::exp(-c::h * f / (c::k_b * t));
    CHECK(ratio == doctest::Approx(0.9513).epsilon(1e-4));
    CHECK(effective_temperature(1.0, ratio, f) == doctest::Approx(t).epsilon(1e-12));
    const double f_anchor = c::k_b * t / c::h;
    CHECK(effective_temperature(1.0, std::exp(-1.0), f_anchor) == doctest::Approx(t).epsilon(1e-14));
    CHECK(effective_temperature(1.0, 1e-300, 5e9) < 1e-3);
    CHECK_THROWS_AS(effective_temperature(0.4, 0.6, f), ValidationError);
}
