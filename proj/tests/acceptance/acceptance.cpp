// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "fluxonium/config.hpp"
#include "fluxonium/constants.hpp"
#include "fluxonium/dephasing.hpp"
#include "fluxonium/field.hpp"
#include "fluxonium/fitting.hpp"
#include "fluxonium/kinetics.hpp"
#include "fluxonium/noise.hpp"
#include "fluxonium/sweep.hpp"
#include "fluxonium/tls.hpp"
#include "oracles/oracles.hpp"
#include "oracles/phase_grid.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

using namespace fluxonium;
namespace c = fluxonium::constants;

namespace {

const CircuitParams qubit{0.957e9, 6.814e9, 0.560e9, 0.0};

struct Outcome {
    bool pass{true};
    std::string detail;

    void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::check(bool ok, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
        detail += " [fail]";
        pass = false;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> unit_grid(int points, double lo = 0.0, double hi = 0.5) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
    return g;
}

// ---------------------------------------------------------------- criteria

Outcome spectrum_anchors() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    const double half = diagonalize(qubit.at_flux(0.5), 6).frequency(0, 1);
    const double t_half = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const double quarter = diagonalize(qubit.at_flux(0.25), 6).frequency(0, 1);
    const double t_quarter = seconds_since(t0);
    o.check(rel(half, 52e6) <= 0.02, "f01(0.5) = %.2f MHz (52 +/- 2%%)", half * 1e-6);
    o.check(rel(quarter, 4.9e9) <= 0.03, "f01(0.25) = %.4f GHz (4.9 +/- 3%%)", quarter * 1e-9);
    o.check(std::max(t_half, t_quarter) < 1.0, "slowest bias %.3f s", std::max(t_half, t_quarter));
    return o;
}

Outcome matrix_elements() {
    Outcome o;
    double worst = 0.0;
    for (double flux : unit_grid(20, 0.0, 0.49)) {
        const EigenSolution sol = diagonalize(qubit.at_flux(flux), 2);
        const double expect = sol.frequency(0, 1) / (8.0 * qubit.e_c) * sol.magnitude(Operator::phi, 0, 1);
        worst = std::max(worst, rel(sol.magnitude(Operator::n, 0, 1), expect));
    }
    o.check(worst <= 1e-6, "max |n01| identity error %.2e over 20 biases", worst);
    const double s = diagonalize(qubit.at_flux(0.5), 2).magnitude(Operator::sin_half_phi, 0, 1);
    o.check(s <= 1e-8, "|sin(phi/2)_01| at half flux %.2e", s);
    return o;
}

Outcome phase_grid_oracle() {
    Outcome o;
    double worst = 0.0;
    for (double flux : {0.0, 0.13, 0.25, 0.41, 0.5}) {
        const CircuitParams p = qubit.at_flux(flux);
        const auto fd = oracle::fd_energies(p.e_c, p.e_j, p.e_l, p.phi_ext, 4);
        const EigenSolution sol = diagonalize(p, 4);
        for (int k = 0; k < 4; ++k) worst = std::max(worst, rel(sol.energies()(k), fd[k]));
    }
    o.check(worst <= 1e-6, "max relative energy deviation %.2e (4 levels, 5 biases)", worst);
    return o;
}

Outcome rate_matrix_suite() {
    Outcome o;
    const double t = 0.05;
    const std::vector<NoiseChannel> thermal{FluxNoise{.a_phi = 6.25e-14, .alpha = 0.62, .t_bath = t},
                                            Dielectric{.tan_delta0 = 4e-6, .epsilon = 0.26, .t_eff = t},
                                            QpJunction{.x_qp = 1e-7, .t = t}};
    double col = 0.0, db = 0.0, gibbs = 0.0;
    for (double flux : {0.05, 0.2, 0.3, 0.45, 0.5}) {
        const EigenSolution sol = diagonalize(qubit.at_flux(flux), 6);
        const RateMatrix b = build_rate_matrix(thermal, sol, 6);
        const double scale = b.b.cwiseAbs().maxCoeff();
        for (int i = 0; i < 6; ++i) col = std::max(col, std::abs(b.b.col(i).sum()) / scale);
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) {
                const double expect = std::exp(-c::h * sol.frequency(i, j) / (c::k_b * t));
                db = std::max(db, std::abs(b.b(j, i) / b.b(i, j) / expect - 1.0));
            }
        const KineticModes m = decompose_modes(b, basis_population(6, 1));
        gibbs = std::max(gibbs, (m.stationary - gibbs_populations(sol.energies(), t)).cwiseAbs().maxCoeff());
    }
    o.check(col <= 1e-12, "column sums %.1e of max entry", col);
    o.check(db <= 1e-10, "detailed balance %.1e", db);
    o.check(gibbs <= 1e-8, "stationary vs Gibbs %.1e", gibbs);

    // Mixed temperatures: the Purcell bath sits above the others.
    std::vector<NoiseChannel> mixed = thermal;
    mixed.push_back(PurcellChannel{.res = {7.439e9, 124.6e6, 1.93e5, 50.0}, .t_res = 0.07});
    const EigenSolution sol = diagonalize(qubit.at_flux(0.3), 6);
    const RateMatrix b = build_rate_matrix(mixed, sol, 6);
    const KineticModes m = decompose_modes(b, basis_population(6, 1));
    const std::vector<double> times = log_time_grid(1e-8, 1e-2, 61);
    const auto traj = evolve_populations(m, times);
    const double fastest = b.b.diagonal().cwiseAbs().maxCoeff();
    double longest = times[0];
    for (std::size_t k = 1; k < times.size(); ++k) longest = std::max(longest, times[k] - times[k - 1]);
    const int steps = std::max(4000, static_cast<int>(std::ceil(longest * fastest / 0.02)));
    const auto ref = oracle::rk4(b.b, basis_population(6, 1), times, steps);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
        worst = std::max(worst, (traj.populations.col(static_cast<Eigen::Index>(k)) - ref[k]).cwiseAbs().maxCoeff());
    o.check(worst <= 1e-8, "eigen vs RK4 max abs %.1e over [1e-8, 1e-2] s", worst);
    return o;
}

Outcome level_convergence() {
    Outcome o;
    const RunConfig cfg = baseline_config();
    double worst = 0.0, at = 0.0;
    int over = 0;
    for (double flux : cfg.flux_grid) {
        const EigenSolution sol = diagonalize(cfg.circuit.at_flux(flux), 8);
        const double g6 = decompose_modes(build_rate_matrix(cfg.channels, sol, 6), basis_population(6, 1)).gamma1_eff;
        const double g8 = decompose_modes(build_rate_matrix(cfg.channels, sol, 8), basis_population(8, 1)).gamma1_eff;
        const double r = std::abs(g6 - g8) / g8;
        if (r >= 1e-3) ++over;
        if (r > worst) {
            worst = r;
            at = flux;
        }
    }
    o.check(worst < 1e-3, "max |G(6)-G(8)|/G = %.2e at %.3f Phi0, %d/%zu biases >= 1e-3", worst, at, over,
            cfg.flux_grid.size());

    const std::vector<NoiseChannel> diel{Dielectric{.tan_delta0 = 4e-6, .epsilon = 0.26,
                                                    .omega_ref = 3.7699111843077517e10, .t_eff = 0.05}};
    const EigenSolution sol = diagonalize(qubit.at_flux(0.3), 6);
    const double t_n = 1.0 / decompose_modes(build_rate_matrix(diel, sol, 6), basis_population(6, 1)).gamma1_eff;
    const double t_two = 1.0 / gamma1_two_level(diel, sol).gamma1;
    o.check(t_n < t_two, "dielectric only at 0.3: N-level %.1f us < two-level %.1f us", t_n * 1e6, t_two * 1e6);
    return o;
}

Outcome exponentiality() {
    Outcome o;
    const RunConfig cfg = baseline_config();
    std::vector<double> m_metric, error, gap12;
    for (double flux : cfg.flux_grid) {
        const EigenSolution sol = diagonalize(cfg.circuit.at_flux(flux), cfg.n_levels);
        const KineticModes m =
            decompose_modes(build_rate_matrix(cfg.channels, sol, cfg.n_levels), basis_population(cfg.n_levels, 1));
        const double t1 = 1.0 / m.gamma1_eff;
        const auto traj = evolve_populations(m, log_time_grid(1e-3 * t1, 10.0 * t1, 100));
        m_metric.push_back(m.m_metric);
        error.push_back(simulate_readout_estimators(traj, m.gamma1_eff).misassignment_error);
        gap12.push_back(sol.frequency(1, 2));
    }
    const std::size_t n = cfg.flux_grid.size();
    std::size_t small = 0;
    for (double v : m_metric) small += v < 0.1;
    o.check(small >= 0.8 * n, "M < 0.1 on %zu/%zu biases (%.0f%%, need 80%%)", small, n, 100.0 * small / n);
    double worst = 0.0;
    for (double e : error) worst = std::max(worst, e);
    o.check(worst <= 0.10, "max mis-assignment error %.2f%%", 100 * worst);

    // Anticrossings of |1> with the next level: local minima of f12.
    int regions = 0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(gap12[k] < gap12[k - 1] && gap12[k] <= gap12[k + 1])) continue;
        ++regions;
        double peak = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(cfg.flux_grid[j] - cfg.flux_grid[k]) <= 0.01 + 1e-12) peak = std::max(peak, error[j]);
        o.check(peak >= 0.01 && peak <= 0.07, "crossing at %.3f Phi0 (f12 %.0f MHz): peak error %.2f%% (1-7%%)",
                cfg.flux_grid[k], gap12[k] * 1e-6, 100 * peak);
    }
    o.check(regions > 0, "%d anticrossing region(s) flagged", regions);
    return o;
}

Outcome dephasing() {
    Outcome o;
    double worst = 0.0;
    for (double a : {0.5, 0.62, 1.0, 1.3}) worst = std::max(worst, rel(echo_prefactor(a), oracle::echo_filter_integral(a)));
    o.check(worst <= 5e-3, "z(alpha) vs filter quadrature %.1e", worst);
    o.check(std::abs(echo_prefactor(1.0) - std::log(2.0)) <= 1e-6, "z(1) - ln2 = %.1e",
            echo_prefactor(1.0) - std::log(2.0));

    // Synthetic echo series near half flux: 1..10 mPhi0 offsets, T1 = 100 us,
    // exponential part 71 us, each trace sampled to four 1/e times.
    const double a_true = std::pow(0.25e-6, 2), t1 = 100e-6, t_exp = 71e-6;
    EchoDataset ds;
    for (int k = 1; k <= 10; ++k) {
        const double slope = c::two_pi * std::abs(flux_sensitivity(qubit.at_flux(0.5 - 1e-3 * k), 0, 1));
        const EchoModel m{.a_phi = a_true, .alpha = 0.62, .t1 = t1, .t_phi_exp = t_exp, .slope = slope};
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) ((echo_envelope(m, 0.5 * (lo + hi)) > std::exp(-1.0)) ? lo : hi) = 0.5 * (lo + hi);
        EchoSynthesis s{.truth = m, .slopes = {slope}, .times = {}, .noise = 0.0, .amplitude = 0.5, .offset = 0.5};
        for (int j = 0; j <= 100; ++j) s.times.push_back(4.0 * lo * j / 100.0);
        const EchoDataset one = generate_synthetic_echo(s, static_cast<std::uint64_t>(k));
        ds.records.insert(ds.records.end(), one.records.begin(), one.records.end());
    }
    const EchoExtractionOptions opts{.t_phi_exp = t_exp};
    const double a_062 = extract_flux_noise_from_echo(ds, 0.62, opts).a_phi;
    const double a_1 = extract_flux_noise_from_echo(ds, 1.0, opts).a_phi;
    o.check(rel(a_062, a_true) <= 0.10, "alpha 0.62 refit A = (%.3f uPhi0)^2 (0.25)", std::sqrt(a_062) * 1e6);
    o.check(rel(a_1, std::pow(3.7e-6, 2)) <= 0.10, "alpha 1 refit A = (%.3f uPhi0)^2 (3.7)", std::sqrt(a_1) * 1e6);
    return o;
}

Outcome effective_q() {
    Outcome o;
    const double t = 0.05, a_phi = std::pow(0.25e-6, 2), alpha = 0.62;
    const double q = effective_inductive_q(qubit.e_l, a_phi, alpha, t, 52e6);
    o.check(q >= 3.2e8 / 2 && q <= 3.2e8 * 2, "Q_L = %.3g (3.2e8 within x2)", q);
    const EigenSolution sol = diagonalize(qubit.at_flux(0.5), 4);
    const double g_flux = gamma1_two_level({FluxNoise{.a_phi = a_phi, .alpha = alpha, .t_bath = t}}, sol).gamma1;
    const double g_ind = gamma1_two_level({Inductive{.q_l = q, .t_eff = t}}, sol).gamma1;
    o.check(rel(g_ind, g_flux) <= 0.10, "Gamma1 inductive %.4g vs flux %.4g 1/s", g_ind, g_flux);
    return o;
}

Outcome tls() {
    Outcome o;
    const TlsEnsemble ens{.p_density = 1e44, .dipole = 1e-29, .eps_r = 10.0, .n_c = 1.0};
    const double omega = c::two_pi * 6e9;
    auto temperature_for = [&](const PhononBath& b, double x) {
        double lo = 1e-5, hi = 10.0;
        for (int k = 0; k < 200; ++k) {
            const double mid = std::sqrt(lo * hi);
            (omega * tls_tau_min(b, 2 * c::k_b * mid, mid) > x ? lo : hi) = mid;
        }
        return std::sqrt(lo * hi);
    };
    double worst = 0.0, worst_t = 0.0, worst_w = 0.0;
    for (int d = 1; d <= 3; ++d) {
        const PhononBath b{.gamma_elastic = 1.6e-19, .speed = 5000.0, .density_d = 2300.0 * std::pow(1e-7, 3 - d), .dim = d};
        for (double x : {100.0, 1000.0}) {
            const double t = temperature_for(b, x);
            worst = std::max(worst, rel(relaxation_loss_tangent(ens, b, omega, t),
                                        relaxation_loss_asymptotic(ens, b, omega, t).tan_delta));
        }
        // Exponents from the quadrature itself, deep in the slow regime.
        const double t = temperature_for(b, 1e4);
        const double q0 = relaxation_loss_tangent(ens, b, omega, t);
        const double s_t = std::log(relaxation_loss_tangent(ens, b, omega, 1.1 * t) / q0) / std::log(1.1);
        const double s_w = std::log(relaxation_loss_tangent(ens, b, 1.1 * omega, t) / q0) / std::log(1.1);
        worst_t = std::max(worst_t, std::abs(s_t - d) / d);
        worst_w = std::max(worst_w, std::abs(s_w + 1.0));
    }
    o.check(worst <= 0.02, "quadrature vs asymptote %.2f%% (omega tau_min 100, 1000)", 100 * worst);
    o.check(worst_t <= 0.01, "T^d exponent error %.2f%%", 100 * worst_t);
    o.check(worst_w <= 0.01, "omega^-1 exponent error %.2f%%", 100 * worst_w);
    return o;
}

RunConfig composite_config(LevelMode mode, int points) {
    RunConfig cfg = baseline_config();
    cfg.channels = {FluxNoise{.a_phi = std::pow(0.23e-6, 2), .alpha = 0.62, .t_bath = 0.05},
                    Dielectric{.tan_delta0 = 4e-6, .epsilon = 0.31, .t_eff = 0.05}};
    cfg.free = {{.channel = 0, .field = "a_phi"}, {.channel = 1, .field = "tan_delta0"}};
    cfg.level_mode = mode;
    cfg.flux_grid = unit_grid(points);
    return cfg;
}

Outcome fit_harness() {
    Outcome o;
    {
        const RunConfig cfg = composite_config(LevelMode::n, 60);
        CompositeFitSpec spec = fit_spec(cfg);
        set_channel_parameter(spec.channels[0], "a_phi", 2e-13);
        set_channel_parameter(spec.channels[1], "tan_delta0", 1e-5);
        const FitResult f = fit_t1_composite(generate_synthetic(cfg, 0.0, 1), spec);
        const double ea = rel(f.value("flux_noise.a_phi"), std::pow(0.23e-6, 2));
        const double et = rel(f.value("dielectric.tan_delta0"), 4e-6);
        o.check(std::max(ea, et) <= 0.05, "composite recovery errors %.1e, %.1e", ea, et);
    }
    {
        PhenomPowerLaw truth{.alpha = 1.5, .beta1 = 0.32, .gamma = 0.19, .beta2 = 2.9};
        const double w0 = c::two_pi * 1e9, t0 = 0.05;
        truth.a = 1e3 / phenom_normalized_rate({.a = 1.0, .alpha = 1.5, .beta1 = 0.32}, qubit, w0, t0);
        truth.b = 1e3 / phenom_normalized_rate({.b = 1.0, .gamma = 0.19, .beta2 = 2.9}, qubit, w0, t0);
        std::vector<PowerLawPoint> pts;
        for (double t : {0.02, 0.04, 0.06, 0.08, 0.1})
            for (double flux : unit_grid(24, 0.02, 0.48)) {
                const double w = diagonalize(qubit.at_flux(flux), 2).angular_frequency(0, 1);
                pts.push_back({w, t, phenom_normalized_rate(truth, qubit, w, t), 0.0});
            }
        const PowerLawFit f = fit_power_law_global(pts, qubit, {.alpha = 1.0, .beta2 = 2.0});
        const double e = std::max({rel(f.params.alpha, 1.5), rel(f.params.beta1, 0.32), rel(f.params.gamma, 0.19),
                                   rel(f.params.beta2, 2.9)});
        o.check(e <= 0.05, "power law (%.3f, %.3f, %.3f, %.3f)", f.params.alpha, f.params.beta1, f.params.gamma,
                f.params.beta2);
    }
    auto normalized = [](const NoiseChannel& ch, double lo) {
        std::vector<NormalizedRatePoint> d;
        for (double flux : unit_grid(40, lo, 0.5)) {
            const EigenSolution sol = diagonalize(qubit.at_flux(flux), 2);
            const double n = sol.magnitude(Operator::n, 0, 1);
            d.push_back({sol.frequency(0, 1), gamma1_two_level({ch}, sol).gamma1 / (n * n), 0.0});
        }
        return fit_normalized_rate(d).mu;
    };
    const double mu_flux = normalized(FluxNoise{.a_phi = 1e-12, .alpha = 1.0, .t_bath = 0.05}, 0.05);
    o.check(std::abs(mu_flux - 3.0) <= 0.05, "mu (1/f flux) = %.3f (3.0 +/- 0.05)", mu_flux);
    // Band with f01 <= k_B T / h at T_eff = 50 mK.
    const double mu_diel = normalized(Dielectric{.tan_delta0 = 4e-6, .epsilon = 0.7, .t_eff = 0.05}, 0.45);
    o.check(std::abs(mu_diel - 0.3) <= 0.05, "mu (dielectric eps 0.7) = %.3f (0.3 +/- 0.05)", mu_diel);

    const FieldModelParams fm{.ej0 = 6.814e9, .b_delta = 2.2, .b_phi0 = 857.0, .b_c = 487.0};
    std::vector<FieldPoint> pts;
    for (int i = 0; i <= 20; ++i) pts.push_back({5.0 * i, fraunhofer_ej(fm, 5.0 * i), 0.0});
    const FieldFits ff = fit_field_models(pts);
    o.check(rel(ff.fraunhofer.b_phi0, 857.0) <= 0.01 && rel(ff.fraunhofer.b_delta, 2.2) <= 0.01,
            "Fraunhofer B_Phi0 %.2f G, B_delta %.3f G", ff.fraunhofer.b_phi0, ff.fraunhofer.b_delta);
    const double l = junction_length(ff.fraunhofer.b_phi0, 50e-9, 1e-9);
    o.check(rel(l, 240e-9) <= 0.05, "l = %.1f nm (240 +/- 5%%)", l * 1e9);
    const double dx = field_dependence(fm, 100.0, 0.05).delta_x_qp;
    o.check(dx > 0.0 && std::abs(std::log10(dx) + 22.0) <= 0.5, "dx_qp(100 G, 50 mK) = %.3g (order 1e-22)", dx);
    return o;
}

Outcome bootstrap() {
    Outcome o;
    {
        const RunConfig cfg = composite_config(LevelMode::n, 60);
        const T1Dataset ds = generate_synthetic(cfg, 0.05, 11);
        const auto t0 = std::chrono::steady_clock::now();
        const FitResult a = bootstrap_confidence(ds, fit_spec(cfg), 1000, 3);
        const double secs = seconds_since(t0);
        o.check(secs < 60.0, "n = 1000, 60 points, N-level: %.1f s", secs);
        const FitResult b = bootstrap_confidence(ds, fit_spec(cfg), 1000, 3);
        o.check(a.values == b.values && a.ci_low == b.ci_low && a.ci_high == b.ci_high, "same-seed rerun %s",
                a.ci_low == b.ci_low ? "bit-identical" : "differs");
    }
    {
        const RunConfig cfg = composite_config(LevelMode::two, 60);
        const CompositeFitSpec spec = fit_spec(cfg);
        const SweepResult sweep = run_sweep(cfg, SweepKind::flux);
        const double truth[2] = {std::pow(0.23e-6, 2), 4e-6};
        int covered[2] = {0, 0};
        const int trials = 100;
        for (int k = 0; k < trials; ++k) {
            const FitResult f = bootstrap_confidence(synthetic_from_sweep(sweep, 0.05, 1000 + k), spec, 1000, k);
            for (int p = 0; p < 2; ++p) covered[p] += f.ci_low[p] <= truth[p] && truth[p] <= f.ci_high[p];
        }
        o.check(covered[0] >= 93, "A_Phi coverage %d/%d", covered[0], trials);
        o.check(covered[1] >= 93, "tan_delta0 coverage %d/%d", covered[1], trials);
    }
    return o;
}

Outcome radiation_bounds() {
    Outcome o;
    const EigenSolution sol = diagonalize(qubit.at_flux(0.5), 4);
    const double t_charge = 1.0 / gamma1_two_level({ChargeLine{.c_d = 20e-18}}, sol).gamma1;
    const double t_flux = 1.0 / gamma1_two_level({FluxLine{.m_d = c::phi0 / 21.5e-3}}, sol).gamma1;
    o.check(t_charge >= 0.1, "charge line T1 = %.3g us (>= 1e5)", t_charge * 1e6);
    o.check(t_flux >= 0.2, "flux line T1 = %.3g s (>= 0.2)", t_flux);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"spectrum anchors", spectrum_anchors},
        {"matrix-element identity", matrix_elements},
        {"phase-grid oracle", phase_grid_oracle},
        {"rate-matrix suite", rate_matrix_suite},
        {"N-level convergence", level_convergence},
        {"exponentiality", exponentiality},
        {"dephasing", dephasing},
        {"effective Q_L", effective_q},
        {"TLS loss", tls},
        {"fit harness", fit_harness},
        {"bootstrap", bootstrap},
        {"radiation bounds", radiation_bounds},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %2zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria pass\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed ? 1 : 0;
}
