// sweep.cpp

#include "fluxonium/sweep.hpp"

#include "fluxonium/errors.hpp"
#include "fluxonium/field.hpp"
#include "fluxonium/io.hpp"
#include "fluxonium/kinetics.hpp"
#include "fluxonium/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>

namespace fluxonium {

namespace {

std::string point_label(double phi, double t, double b) {
    return "at phi_ext=" + format_number(phi) + " Phi0, T=" + format_number(t) + " K, B=" + format_number(b) +
           " G: ";
}

std::vector<std::string> unique_names(const std::vector<NoiseChannel>& channels) {
    std::map<std::string, int> count;
    for (const auto& ch : channels) ++count[channel_name(ch)];
    std::map<std::string, int> seen;
    std::vector<std::string> out;
    for (const auto& ch : channels) {
        const std::string n = channel_name(ch);
        out.push_back(count[n] > 1 ? n + "_" + std::to_string(++seen[n]) : n);
    }
    return out;
}

struct GridPoint {
    double phi, t, b;
};

std::vector<GridPoint> grid(const RunConfig& c, SweepKind kind) {
    std::vector<GridPoint> g;
    const auto& second = kind == SweepKind::temperature ? c.temperatures
                         : kind == SweepKind::field     ? c.fields
                                                        : std::vector<double>{0.0};
    for (double phi : c.flux_grid)
        for (double v : second) {
            if (kind == SweepKind::temperature) g.push_back({phi, v, 0.0});
            else if (kind == SweepKind::field) g.push_back({phi, 0.0, v});
            else g.push_back({phi, 0.0, 0.0});
        }
    return g;
}

}  // namespace

SweepKind parse_sweep_kind(const std::string& name) {
    if (name == "flux") return SweepKind::flux;
    if (name == "temperature") return SweepKind::temperature;
    if (name == "field") return SweepKind::field;
    throw ValidationError("unknown sweep kind '" + name + "'");
}

std::string to_string(SweepKind k) {
    switch (k) {
        case SweepKind::flux: return "flux";
        case SweepKind::temperature: return "temperature";
        case SweepKind::field: return "field";
    }
    return "unknown";
}

PointModel point_model(const RunConfig& config, SweepKind kind, double t, double b) {
    PointModel m{config.circuit, config.channels};
    if (kind == SweepKind::temperature)
        for (auto& ch : m.channels) ch = with_temperature(ch, t);
    if (kind == SweepKind::field) {
        if (!config.field_model) throw ValidationError("field sweep needs a [field] section");
        double t_qp = 0.05;
        for (const auto& ch : m.channels)
            if (const auto* q = std::get_if<QpJunction>(&ch)) t_qp = q->t;
        const FieldDependence fd = field_dependence(*config.field_model, b, t_qp);
        m.circuit.e_j = fd.e_j;
        for (auto& ch : m.channels) {
            if (auto* q = std::get_if<QpJunction>(&ch)) {
                q->gap = fd.gap;
                q->x_qp += fd.delta_x_qp;
            } else if (auto* a = std::get_if<QpArray>(&ch)) {
                a->gap = fd.gap;
                a->x_qpa += fd.delta_x_qp;
            }
        }
    }
    return m;
}

SweepRow evaluate_point(const RunConfig& config, SweepKind kind, double phi_ext, double t, double b) {
    try {
        const PointModel m = point_model(config, kind, t, b);
        const int n = std::max(config.n_levels, 2);
        const EigenSolution sol = diagonalize(m.circuit.at_flux(phi_ext), n);
        SweepRow row;
        row.phi_ext = phi_ext;
        row.temperature = t;
        row.field = b;
        row.e_j = m.circuit.e_j;
        row.f01 = sol.frequency(0, 1);
        row.phi01 = sol.magnitude(Operator::phi, 0, 1);
        row.n01 = sol.magnitude(Operator::n, 0, 1);
        row.sin01 = sol.magnitude(Operator::sin_half_phi, 0, 1);
        const Gamma1Breakdown two = gamma1_two_level(m.channels, sol);
        row.gamma1_two_level = two.gamma1;
        for (const auto& c : two.channels) row.channel_gamma.push_back(c.gamma);
        const KineticModes modes = decompose_modes(build_rate_matrix(m.channels, sol, n), basis_population(n, 1));
        row.m_metric = modes.m_metric;
        row.gamma1_eff = config.level_mode == LevelMode::two ? two.gamma1 : modes.gamma1_eff;
        return row;
    } catch (const ValidationError& e) {
        throw ValidationError(point_label(phi_ext, t, b) + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(point_label(phi_ext, t, b) + e.what());
    }
}

SweepResult run_sweep(const RunConfig& config, SweepKind kind) {
    config.validate();
    if (config.channels.empty()) throw ValidationError("sweep needs at least one channel");
    const auto g = grid(config, kind);
    SweepResult r;
    r.kind = kind;
    r.channel_names = unique_names(config.channels);
    r.config_hash = config_hash(config);
    r.version = version_string();
    r.rows.resize(g.size());
    parallel_for(g.size(), [&](std::size_t i) { r.rows[i] = evaluate_point(config, kind, g[i].phi, g[i].t, g[i].b); });
    return r;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << "# " << r.version << " config_hash=" << r.config_hash << " sweep=" << to_string(r.kind) << '\n';
    out << "phi_ext_phi0,temp_mK,field_G,ej_ghz,f01_ghz,abs_phi01,abs_n01,abs_sin_half_phi01";
    for (const auto& n : r.channel_names) out << ",gamma_" << n << "_per_s";
    out << ",gamma1_two_level_per_s,gamma1_eff_per_s,t1_us,m_metric\n";
    for (const auto& row : r.rows) {
        out << format_number(row.phi_ext) << ',' << format_number(units::k_to_mk(row.temperature)) << ','
            << format_number(row.field) << ',' << format_number(units::hz_to_ghz(row.e_j)) << ','
            << format_number(units::hz_to_ghz(row.f01)) << ',' << format_number(row.phi01) << ','
            << format_number(row.n01) << ',' << format_number(row.sin01);
        for (double g : row.channel_gamma) out << ',' << format_number(g);
        out << ',' << format_number(row.gamma1_two_level) << ',' << format_number(row.gamma1_eff) << ','
            << format_number(units::s_to_us(1.0 / row.gamma1_eff)) << ',' << format_number(row.m_metric) << '\n';
    }
}

T1Dataset generate_synthetic(const RunConfig& config, double noise_level, std::uint64_t seed, SweepKind kind) {
    if (!(noise_level >= 0.0)) throw ValidationError("generate_synthetic: noise_level must be >= 0");
    return synthetic_from_sweep(run_sweep(config, kind), noise_level, seed);
}

T1Dataset synthetic_from_sweep(const SweepResult& sweep, double noise_level, std::uint64_t seed) {
    if (!(noise_level >= 0.0)) throw ValidationError("synthetic_from_sweep: noise_level must be >= 0");
    const SweepKind kind = sweep.kind;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    T1Dataset ds;
    for (const auto& row : sweep.rows) {
        T1Record rec;
        rec.phi_ext = row.phi_ext;
        const double t1 = 1.0 / row.gamma1_eff;
        rec.t1 = noise_level > 0.0 ? t1 * std::exp(noise_level * normal(rng)) : t1;
        rec.sigma = std::max(noise_level, 0.01) * rec.t1;
        if (kind == SweepKind::temperature) rec.temperature = row.temperature;
        if (kind == SweepKind::field) rec.field = row.field;
        ds.records.push_back(rec);
    }
    return ds;
}

EchoDataset generate_synthetic_echo(const EchoSynthesis& s, std::uint64_t seed) {
    if (s.slopes.empty() || s.times.empty()) throw ValidationError("generate_synthetic_echo: empty slopes or times");
    if (!(s.noise >= 0.0)) throw ValidationError("generate_synthetic_echo: noise must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    EchoDataset ds;
    for (double slope : s.slopes) {
        EchoModel m = s.truth;
        m.slope = slope;
        m.validate();
        EchoRecord r;
        r.slope = slope;
        r.t1 = m.t1;
        r.gamma_tilde = echo_gamma_tilde(m);
        r.times = s.times;
        for (double t : s.times) {
            double v = s.amplitude * echo_envelope(m, t) + s.offset;
            if (s.noise > 0.0) v += s.noise * normal(rng);
            r.values.push_back(v);
        }
        ds.records.push_back(std::move(r));
    }
    return ds;
}

}  // namespace fluxonium
