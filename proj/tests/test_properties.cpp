#include "doctest.h"

#include "fluxonium/bootstrap.hpp"
#include "fluxonium/config.hpp"
#include "fluxonium/constants.hpp"
#include "fluxonium/dephasing.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/kinetics.hpp"
#include "fluxonium/noise.hpp"
#include "fluxonium/optimize.hpp"
#include "fluxonium/parallel.hpp"
#include "fluxonium/sweep.hpp"
#include "fluxonium/tls.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>

using namespace fluxonium;
namespace c = fluxonium::constants;

namespace {

const CircuitParams qubit{0.957e9, 6.814e9, 0.560e9, 0.0};

std::vector<NoiseChannel> thermal_channels() {
    return {FluxNoise{.a_phi = 6.25e-14, .alpha = 0.62, .t_bath = 0.05},
            Dielectric{.tan_delta0 = 4e-6, .epsilon = 0.26, .t_eff = 0.05},
            Inductive{.q_l = 3e8, .t_eff = 0.05},
            QpJunction{.x_qp = 1e-7, .t = 0.05},
            QpArray{.x_qpa = 1e-7, .t = 0.05}};
}

}  // namespace

TEST_CASE("property: eigenvectors are orthonormal and energies ordered") {
    for (double flux : {0.0, 0.17, 0.33, 0.5}) {
        const EigenSolution sol = diagonalize(qubit.at_flux(flux), 10);
        const Eigen::MatrixXd g = sol.vectors().transpose() * sol.vectors();
        CHECK((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
        for (int i = 1; i < sol.levels(); ++i) CHECK(sol.energies()(i) >= sol.energies()(i - 1));
    }
}

TEST_CASE("property: spectrum is periodic and mirror symmetric in flux") {
    for (double flux : {0.05, 0.21, 0.37, 0.46}) {
        const EigenSolution a = diagonalize(qubit.at_flux(flux), 6);
        const EigenSolution p = diagonalize(qubit.at_flux(flux + 1.0), 6);
        const EigenSolution m = diagonalize(qubit.at_flux(-flux), 6);
        for (int i = 1; i < 6; ++i) {
            const double e = a.frequency(0, i);
            CHECK(std::abs(p.frequency(0, i) - e) <= 1e-10 * e);
            CHECK(std::abs(m.frequency(0, i) - e) <= 1e-10 * e);
        }
    }
}

TEST_CASE("property: matrix elements are Hermitian") {
    const EigenSolution sol = diagonalize(qubit.at_flux(0.3), 6);
    for (Operator op : {Operator::phi, Operator::n, Operator::sin_half_phi})
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                const auto a = sol.matrix_element(op, i, j).value;
                const auto b = sol.matrix_element(op, j, i).value;
                CHECK(std::abs(a - std::conj(b)) <= 1e-12 * (1.0 + std::abs(a)));
            }
}

TEST_CASE("property: symmetrized spectra are non-negative and finite") {
    auto channels = thermal_channels();
    channels.push_back(ChargeLine{.c_d = 20e-18});
    channels.push_back(FluxLine{.m_d = c::phi0 / 21.5e-3});
    const CircuitParams circuit = qubit.at_flux(0.3);
    for (const auto& ch : channels)
        for (double f = 1e6; f < 2e10; f *= 1.7) {
            const double v = symmetrized_psd(ch, circuit, c::two_pi * f);
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    CHECK_THROWS_AS(symmetrized_psd(channels[0], circuit, -1.0), ValidationError);
}

TEST_CASE("property: N = 2 kinetics reproduce the two-level rate exactly") {
    for (double flux : {0.1, 0.3, 0.5}) {
        const EigenSolution sol = diagonalize(qubit.at_flux(flux), 2);
        const auto ch = thermal_channels();
        const KineticModes m = decompose_modes(build_rate_matrix(ch, sol, 2), basis_population(2, 1));
        CHECK(m.gamma1_eff == doctest::Approx(gamma1_two_level(ch, sol).gamma1).epsilon(1e-13));
    }
}

TEST_CASE("property: echo decay exponent grows with time") {
    for (double alpha : {0.3, 0.62, 1.0, 1.7}) {
        const EchoModel m{.a_phi = 1e-12, .alpha = alpha, .slope = c::two_pi * 1e9};
        double prev = 0.0, env = 1.0;
        for (double t = 1e-8; t < 1e-3; t *= 1.5) {
            const double v = echo_coherence(m, t);
            CHECK(v > prev);
            CHECK(echo_envelope(m, t) <= env);
            prev = v;
            env = echo_envelope(m, t);
        }
    }
    for (double alpha = 0.05; alpha < 2.0; alpha += 0.05) CHECK(echo_prefactor(alpha) > 0.0);
}

TEST_CASE("property: echo amplitude extraction is slope-scale equivariant") {
    auto dataset = [](double k) {
        EchoDataset ds;
        for (double s : {0.4, 0.8, 1.2, 1.6, 2.0}) {
            EchoModel m{.a_phi = std::pow(3.7e-6, 2), .alpha = 0.62, .slope = k * c::two_pi * 1e9 * s};
            ds.records.push_back({.slope = m.slope, .gamma_tilde = echo_gamma_tilde(m), .sigma = 0.0});
        }
        return ds;
    };
    const double base = extract_flux_noise_from_echo(dataset(1.0), 0.62).a_phi;
    CHECK(base == doctest::Approx(std::pow(3.7e-6, 2)).epsilon(1e-9));
    for (double k : {0.3, 2.5, 10.0})
        CHECK(extract_flux_noise_from_echo(dataset(k), 0.62).a_phi == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("property: phonon relaxation follows coth(E / 2kT)") {
    const PhononBath b{.gamma_elastic = 1.6e-19, .speed = 5000.0, .density_d = 2300.0, .dim = 3};
    const double e = c::h * 5e9, d0 = 0.6 * e;
    for (double t : {0.02, 0.05, 0.1}) {
        const double r = tls_relaxation_rate(b, e, d0, 2 * t) / tls_relaxation_rate(b, e, d0, t);
        const double expect = std::tanh(e / (2 * c::k_b * t)) / std::tanh(e / (4 * c::k_b * t));
        CHECK(r == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("property: relaxation loss increases with temperature") {
    const TlsEnsemble ens{.p_density = 1e44, .dipole = 1e-29, .eps_r = 10.0, .n_c = 1.0};
    const double omega = c::two_pi * 1e9;
    for (int d = 1; d <= 3; ++d) {
        const PhononBath b{.gamma_elastic = 1.6e-19, .speed = 5000.0,
                           .density_d = 2300.0 * std::pow(1e-7, 3 - d), .dim = d};
        double prev = 0.0;
        for (double t = 0.02; t <= 0.2001; t += 0.03) {
            const double v = relaxation_loss_tangent(ens, b, omega, t);
            CHECK(v >= 0.0);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("property: asymptotic loss within 2% over 20-200 mK in the slow regime") {
    const TlsEnsemble ens{.p_density = 1e44, .dipole = 1e-29, .eps_r = 10.0, .n_c = 1.0};
    const double omega = c::two_pi * 1e9;
    for (int d = 1; d <= 3; ++d) {
        PhononBath b{.gamma_elastic = 1.6e-19, .speed = 5000.0, .density_d = 2300.0 * std::pow(1e-7, 3 - d), .dim = d};
        // Weaken the coupling until omega tau_min >= 200 everywhere on the grid.
        const double x = omega * tls_tau_min(b, 2 * c::k_b * 0.2, 0.2);
        if (x < 200.0) b.gamma_elastic *= std::sqrt(x / 200.0);
        for (double t : {0.02, 0.05, 0.1, 0.2}) {
            REQUIRE(omega * tls_tau_min(b, 2 * c::k_b * t, t) > 100.0);
            const double q = relaxation_loss_tangent(ens, b, omega, t);
            CHECK(relaxation_loss_asymptotic(ens, b, omega, t).tan_delta == doctest::Approx(q).epsilon(0.02));
        }
    }
}

TEST_CASE("property: bootstrap intervals are stable under resample doubling") {
    RunConfig cfg = baseline_config();
    cfg.channels = {FluxNoise{.a_phi = std::pow(0.23e-6, 2), .alpha = 0.62, .t_bath = 0.05},
                    Dielectric{.tan_delta0 = 4e-6, .epsilon = 0.31, .t_eff = 0.05}};
    cfg.free = {{.channel = 0, .field = "a_phi"}, {.channel = 1, .field = "tan_delta0"}};
    cfg.level_mode = LevelMode::two;
    cfg.flux_grid.clear();
    for (int i = 0; i < 30; ++i) cfg.flux_grid.push_back(0.5 * i / 29.0);
    const T1Dataset ds = generate_synthetic(cfg, 0.05, 21);
    const FitResult a = bootstrap_confidence(ds, fit_spec(cfg), 1000, 5);
    const FitResult b = bootstrap_confidence(ds, fit_spec(cfg), 2000, 5);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double width = a.ci_high[k] - a.ci_low[k];
        CHECK(std::abs(b.ci_low[k] - a.ci_low[k]) < 0.1 * width);
        CHECK(std::abs(b.ci_high[k] - a.ci_high[k]) < 0.1 * width);
    }
}

TEST_CASE("infra: percentile and resampling") {
    CHECK(percentile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(percentile({0.0, 10.0}, 0.25) == doctest::Approx(2.5));
    CHECK(resample_indices(50, 3, 7) == resample_indices(50, 3, 7));
    CHECK(resample_indices(50, 3, 7) != resample_indices(50, 3, 8));
    for (auto i : resample_indices(50, 1, 1)) CHECK(i < 50);
    CHECK(splitmix64(0) != splitmix64(1));
}

TEST_CASE("infra: bootstrap failure budget") {
    const auto fail_all = [](const std::vector<std::size_t>&) -> std::optional<Eigen::VectorXd> { return std::nullopt; };
    CHECK_THROWS_AS(run_bootstrap(20, 100, 1, fail_all), NumericalError);
    std::atomic<int> calls{0};
    const auto ok = [&](const std::vector<std::size_t>& idx) -> std::optional<Eigen::VectorXd> {
        ++calls;
        return Eigen::VectorXd::Constant(1, static_cast<double>(idx[0]));
    };
    const BootstrapSamples s = run_bootstrap(20, 100, 1, ok);
    CHECK(s.estimates.size() == 100);
    CHECK(calls == 100);
    CHECK(s.failures == 0);
}

TEST_CASE("infra: parallel loop covers every index once and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw NumericalError("x"); }), NumericalError);
    CHECK(worker_count() >= 1);
}

TEST_CASE("infra: least squares on a known problem") {
    const ResidualFunction f = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(20);
        for (int k = 0; k < 20; ++k) r(k) = p(0) * std::exp(-p(1) * k * 0.1) - 2.0 * std::exp(-0.7 * k * 0.1);
        return r;
    };
    const LmResult r = levenberg_marquardt(f, {{"a", 1.0, 0.0, 10.0, false, false}, {"k", 0.2, 0.0, 5.0, true, false}});
    CHECK(r.params(0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(r.params(1) == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(r.converged);
}
