// fluxonium: command-line front end.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include "fluxonium/config.hpp"
#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/field.hpp"
#include "fluxonium/fitting.hpp"
#include "fluxonium/io.hpp"
#include "fluxonium/kinetics.hpp"
#include "fluxonium/report.hpp"
#include "fluxonium/spectrum.hpp"
#include "fluxonium/sweep.hpp"
#include "fluxonium/tls.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

using namespace fluxonium;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> levels;
    std::string out;
};

RunConfig load(const Globals& g) {
    RunConfig c = g.config_path.empty() ? baseline_config() : load_config(g.config_path);
    if (g.seed) c.seed = *g.seed;
    if (g.levels) c.n_levels = *g.levels;
    c.validate();
    return c;
}

Provenance provenance(const RunConfig& c) { return {config_hash(c), version_string(), c.seed}; }

std::string header_line(const RunConfig& c) {
    return version_string() + " config_hash=" + config_hash(c) + " seed=" + std::to_string(c.seed);
}

// Writes to --out when given, otherwise stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ValidationError("cannot write '" + path + "'");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_text(const std::string& path, const std::string& text) {
    Sink s(path);
    s.os() << text;
}

std::vector<double> flux_points(const RunConfig& c, const std::vector<double>& flux) {
    return flux.empty() ? c.flux_grid : flux;
}

int cmd_spectrum(const Globals& g, const std::vector<double>& flux) {
    const RunConfig c = load(g);
    Sink s(g.out);
    auto& os = s.os();
    os << "# " << header_line(c) << '\n' << "phi_ext_phi0";
    for (int k = 0; k < c.n_levels; ++k) os << ",e" << k << "_ghz";
    os << ",f01_ghz,f12_ghz\n";
    for (double phi : flux_points(c, flux)) {
        const EigenSolution sol = diagonalize(c.circuit.at_flux(phi), std::max(c.n_levels, 3));
        os << format_number(phi);
        for (int k = 0; k < c.n_levels; ++k) os << ',' << format_number(units::hz_to_ghz(sol.energies()(k)));
        os << ',' << format_number(units::hz_to_ghz(sol.frequency(0, 1))) << ','
           << format_number(units::hz_to_ghz(sol.frequency(1, 2))) << '\n';
    }
    return 0;
}

int cmd_melem(const Globals& g, const std::vector<double>& flux) {
    const RunConfig c = load(g);
    Sink s(g.out);
    auto& os = s.os();
    os << "# " << header_line(c) << '\n' << "phi_ext_phi0,i,j,freq_ghz,abs_phi,abs_n,abs_sin_half_phi\n";
    for (double phi : flux_points(c, flux)) {
        const EigenSolution sol = diagonalize(c.circuit.at_flux(phi), c.n_levels);
        for (int i = 0; i < c.n_levels; ++i)
            for (int j = i + 1; j < c.n_levels; ++j)
                os << format_number(phi) << ',' << i << ',' << j << ','
                   << format_number(units::hz_to_ghz(sol.frequency(i, j))) << ','
                   << format_number(sol.magnitude(Operator::phi, i, j)) << ','
                   << format_number(sol.magnitude(Operator::n, i, j)) << ','
                   << format_number(sol.magnitude(Operator::sin_half_phi, i, j)) << '\n';
    }
    return 0;
}

int cmd_t1(const Globals& g, const std::string& kind_name, bool plot) {
    const RunConfig c = load(g);
    const SweepKind kind = parse_sweep_kind(kind_name);
    const SweepResult r = run_sweep(c, kind);
    {
        Sink s(g.out);
        write_sweep_csv(s.os(), r);
    }
    if (plot) {
        if (g.out.empty()) throw ValidationError("t1 --plot needs --out");
        std::vector<PlotSeries> series;
        PlotSeries eff{"T1 N-level (us)", {}, {}}, two{"T1 two-level (us)", {}, {}};
        for (const auto& row : r.rows) {
            eff.x.push_back(row.phi_ext);
            eff.y.push_back(units::s_to_us(1.0 / row.gamma1_eff));
            two.x.push_back(row.phi_ext);
            two.y.push_back(units::s_to_us(1.0 / row.gamma1_two_level));
        }
        series = {eff, two};
        std::ofstream svg(g.out + ".svg"), csv(g.out + ".plot.csv");
        write_svg_plot(svg, series, {.title = "T1 vs flux", .x_label = "Phi_ext / Phi0", .y_label = "T1 (us)", .log_y = true});
        write_plot_csv(csv, series);
    }
    return 0;
}

int cmd_evolve(const Globals& g, double flux, double t_max_factor, int points) {
    const RunConfig c = load(g);
    const EigenSolution sol = diagonalize(c.circuit.at_flux(flux), c.n_levels);
    const RateMatrix b = build_rate_matrix(c.channels, sol, c.n_levels);
    const KineticModes modes = decompose_modes(b, basis_population(c.n_levels, 1));
    const double t1 = 1.0 / modes.gamma1_eff;
    const auto times = log_time_grid(1e-3 * t1, t_max_factor * t1, points);
    const PopulationTrajectory traj = evolve_populations(modes, times);
    const ReadoutEstimates est = simulate_readout_estimators(traj, modes.gamma1_eff);
    Sink s(g.out);
    auto& os = s.os();
    os << "# " << header_line(c) << " phi_ext=" << format_number(flux) << " gamma1_eff_per_s="
       << format_number(modes.gamma1_eff) << " m_metric=" << format_number(modes.m_metric)
       << " t1_leak_to_0_us=" << format_number(units::s_to_us(est.t1_leak_to_0))
       << " t1_leak_to_1_us=" << format_number(units::s_to_us(est.t1_leak_to_1))
       << " misassignment_error=" << format_number(est.misassignment_error) << '\n';
    os << "time_us";
    for (int k = 0; k < c.n_levels; ++k) os << ",p" << k;
    os << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << format_number(units::s_to_us(times[i]));
        for (int k = 0; k < c.n_levels; ++k) os << ',' << format_number(traj.populations(k, static_cast<Eigen::Index>(i)));
        os << '\n';
    }
    return 0;
}

FitResult to_result(const std::vector<std::pair<std::string, std::pair<double, double>>>& v, double residual) {
    FitResult f;
    for (const auto& [name, vs] : v) {
        f.names.push_back(name);
        f.values.push_back(vs.first);
        f.sigmas.push_back(vs.second);
    }
    f.residual_norm = residual;
    f.converged = true;
    return f;
}

int cmd_fit(const Globals& g, const std::string& data, const std::string& schema_name, double alpha) {
    const RunConfig c = load(g);
    const DatasetSchema schema = parse_schema(schema_name);
    LoadReport report;
    const Dataset ds = load_dataset(data, schema, &report);
    for (const auto& r : report.rejected) std::cerr << data << ": line " << r.line << " rejected: " << r.reason << '\n';
    FitResult fit;
    switch (schema) {
        case DatasetSchema::t1_flux:
            fit = fit_t1_composite(std::get<T1Dataset>(ds), fit_spec(c));
            break;
        case DatasetSchema::echo: {
            const auto x = extract_flux_noise_from_echo(std::get<EchoDataset>(ds), alpha);
            fit = to_result({{"a_phi", {x.a_phi, x.sigma_a_phi}}, {"line_slope", {x.line_slope, 0.0}},
                             {"intercept", {x.intercept, 0.0}}, {"r_squared", {x.r_squared, 0.0}}},
                            0.0);
            break;
        }
        case DatasetSchema::spectroscopy: {
            SpectroscopyFitOptions o;
            o.guess = c.circuit;
            const auto x = fit_hamiltonian_spectroscopy(std::get<std::vector<TransitionPoint>>(ds), o);
            fit = to_result({{"e_c", {x.params.e_c, x.sigma_e_c}},
                             {"e_j", {x.params.e_j, x.sigma_e_j}},
                             {"e_l", {x.params.e_l, x.sigma_e_l}}},
                            x.residual_norm);
            break;
        }
        case DatasetSchema::ej_field: {
            const auto x = fit_field_models(std::get<std::vector<FieldPoint>>(ds));
            fit = to_result({{"fraunhofer.ej0", {x.fraunhofer.ej0, x.fraunhofer.sigma_ej0}},
                             {"fraunhofer.b_delta", {x.fraunhofer.b_delta, x.fraunhofer.sigma_b_delta}},
                             {"fraunhofer.b_phi0", {x.fraunhofer.b_phi0, x.fraunhofer.sigma_b_phi0}},
                             {"ginzburg_landau.ej0", {x.ginzburg_landau.ej0, x.ginzburg_landau.sigma_ej0}},
                             {"ginzburg_landau.b_c", {x.ginzburg_landau.b_c, x.ginzburg_landau.sigma_b_c}}},
                            x.fraunhofer.residual_norm);
            break;
        }
    }
    write_text(g.out, fit_report_json(fit, "fit." + schema_name, provenance(c)));
    return 0;
}

int cmd_bootstrap(const Globals& g, const std::string& data, int n) {
    const RunConfig c = load(g);
    const T1Dataset ds = load_t1_dataset(data);
    const FitResult fit = bootstrap_confidence(ds, fit_spec(c), n, c.seed);
    write_text(g.out, fit_report_json(fit, "bootstrap.t1_flux", provenance(c)));
    return 0;
}

int cmd_tls(const Globals& g, const TlsEnsemble& ens, const PhononBath& bath, double freq,
            const std::vector<double>& temps) {
    ens.validate();
    bath.validate();
    const double omega = constants::two_pi * freq;
    Sink s(g.out);
    auto& os = s.os();
    os << "# " << version_string() << '\n'
       << "temp_mK,freq_ghz,resonant_tan_delta,relaxation_tan_delta,asymptotic_tan_delta,asymptotic_valid\n";
    for (double t : temps) {
        const auto a = relaxation_loss_asymptotic(ens, bath, omega, t);
        os << format_number(units::k_to_mk(t)) << ',' << format_number(units::hz_to_ghz(freq)) << ','
           << format_number(resonant_loss_tangent(ens, omega, 0.0, t)) << ','
           << format_number(relaxation_loss_tangent(ens, bath, omega, t)) << ',' << format_number(a.tan_delta) << ','
           << (a.valid ? 1 : 0) << '\n';
    }
    return 0;
}

int cmd_field(const Globals& g, std::vector<double> fields, double t) {
    const RunConfig c = load(g);
    if (!c.field_model) throw ValidationError("field needs a [field] section in the config");
    if (fields.empty()) fields = c.fields;
    Sink s(g.out);
    auto& os = s.os();
    os << "# " << header_line(c) << '\n' << "field_G,ej_fraunhofer_ghz,ej_gl_ghz,gap_ueV,delta_x_qp\n";
    for (double b : fields) {
        const FieldDependence fd = field_dependence(*c.field_model, b, t);
        os << format_number(b) << ',' << format_number(units::hz_to_ghz(fd.e_j)) << ','
           << format_number(units::hz_to_ghz(fd.e_j_gl)) << ',' << format_number(fd.gap / constants::e * 1e6)
           << ',' << format_number(fd.delta_x_qp) << '\n';
    }
    return 0;
}

int cmd_synth(const Globals& g, double noise, const std::string& kind_name) {
    const RunConfig c = load(g);
    const T1Dataset ds = generate_synthetic(c, noise, c.seed, parse_sweep_kind(kind_name));
    Sink s(g.out);
    write_t1_dataset(s.os(), ds, header_line(c) + " noise=" + format_number(noise));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fluxonium decoherence models: spectra, loss channels, rate equations and fits"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "TOML run configuration (default: built-in baseline)");
    app.add_option("--seed", g.seed, "Override the config seed");
    app.add_option("--levels", g.levels, "Override the number of levels N");
    app.add_option("--out", g.out, "Output file (default: stdout)");
    std::function<int()> run;

    std::vector<double> flux;
    auto* spectrum = app.add_subcommand("spectrum", "Eigenenergies over the flux grid")->fallthrough();
    spectrum->add_option("--flux", flux, "Flux points in Phi0 (default: config grid)");
    spectrum->callback([&] { run = [&] { return cmd_spectrum(g, flux); }; });

    auto* melem = app.add_subcommand("melem", "Matrix elements of phi, n and sin(phi/2)")->fallthrough();
    melem->add_option("--flux", flux, "Flux points in Phi0 (default: config grid)");
    melem->callback([&] { run = [&] { return cmd_melem(g, flux); }; });

    std::string kind = "flux";
    bool plot = false;
    auto* t1 = app.add_subcommand("t1", "Per-channel and effective T1 sweep")->fallthrough();
    t1->add_option("--sweep", kind, "flux, temperature or field")->check(CLI::IsMember({"flux", "temperature", "field"}));
    t1->add_flag("--plot", plot, "Also write <out>.svg and <out>.plot.csv");
    t1->callback([&] { run = [&] { return cmd_t1(g, kind, plot); }; });

    double flux_point = 0.3, t_max = 10.0;
    int points = 100;
    auto* evolve = app.add_subcommand("evolve", "Populations after a pi pulse and readout estimators")->fallthrough();
    evolve->add_option("--flux", flux_point, "Flux in Phi0");
    evolve->add_option("--tmax", t_max, "Final time in units of 1/Gamma1_eff");
    evolve->add_option("--points", points, "Log-spaced time points");
    evolve->callback([&] { run = [&] { return cmd_evolve(g, flux_point, t_max, points); }; });

    std::string data, schema = "t1_flux";
    double alpha = 1.0;
    auto* fit = app.add_subcommand("fit", "Fit a dataset and write a JSON report")->fallthrough();
    fit->add_option("--data", data, "CSV dataset")->required();
    fit->add_option("--schema", schema, "t1_flux, echo, spectroscopy or ej_field");
    fit->add_option("--alpha", alpha, "Noise exponent for echo extraction");
    fit->callback([&] { run = [&] { return cmd_fit(g, data, schema, alpha); }; });

    int n_boot = 1000;
    auto* boot = app.add_subcommand("bootstrap", "Bootstrap confidence intervals of the composite T1 fit")->fallthrough();
    boot->add_option("--data", data, "t1_flux CSV")->required();
    boot->add_option("-n,--resamples", n_boot, "Number of resamples");
    boot->callback([&] { run = [&] { return cmd_bootstrap(g, data, n_boot); }; });

    TlsEnsemble ens{.p_density = 1e44, .dipole = 1e-29, .eps_r = 10.0, .n_c = 1.0};
    PhononBath bath{.gamma_elastic = 1.6e-19, .speed = 5000.0, .density_d = 2300.0, .dim = 3};
    double freq = 6e9;
    std::vector<double> temps{0.02, 0.05, 0.1, 0.2};
    auto* tls = app.add_subcommand("tls", "Resonant and relaxation TLS loss tangents")->fallthrough();
    tls->add_option("--p-density", ens.p_density, "TLS density of states, 1/(J m^3)");
    tls->add_option("--dipole", ens.dipole, "Dipole moment, C m");
    tls->add_option("--eps-r", ens.eps_r, "Host permittivity");
    tls->add_option("--gamma", bath.gamma_elastic, "Deformation potential, J");
    tls->add_option("--speed", bath.speed, "Sound speed, m/s");
    tls->add_option("--density", bath.density_d, "Mass density, kg/m^d");
    tls->add_option("--dim", bath.dim, "Phonon dimensionality")->check(CLI::Range(1, 3));
    tls->add_option("--freq", freq, "Frequency, Hz");
    tls->add_option("--temps", temps, "Temperatures, K");
    tls->callback([&] { run = [&] { return cmd_tls(g, ens, bath, freq, temps); }; });

    std::vector<double> fields;
    double t_field = 0.05;
    auto* field = app.add_subcommand("field", "E_J, gap and x_qp versus in-plane field")->fallthrough();
    field->add_option("--fields", fields, "Fields in G (default: config list)");
    field->add_option("--temperature", t_field, "Temperature, K");
    field->callback([&] { run = [&] { return cmd_field(g, fields, t_field); }; });

    double noise = 0.0;
    auto* synth = app.add_subcommand("synth", "Synthetic t1_flux dataset from the config model")->fallthrough();
    synth->add_option("--noise", noise, "Relative lognormal noise");
    synth->add_option("--sweep", kind, "flux, temperature or field")->check(CLI::IsMember({"flux", "temperature", "field"}));
    synth->callback([&] { run = [&] { return cmd_synth(g, noise, kind); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        return run();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::bad_variant_access& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
