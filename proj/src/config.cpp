// config.cpp

#include "fluxonium/config.hpp"

#include "fluxonium/errors.hpp"
#include "fluxonium/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace fluxonium {

namespace {

std::string full(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // TOML floats need a '.', 'e' or one of the special names.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

double number(const toml::node& n, const std::string& what) {
    if (auto v = n.value<double>()) return *v;
    throw ValidationError(what + " must be a number");
}

double number_at(const toml::table& t, std::string_view key, const std::string& ctx, std::optional<double> def = {}) {
    const toml::node* n = t.get(key);
    if (!n) {
        if (def) return *def;
        throw ValidationError(ctx + ": missing '" + std::string(key) + "'");
    }
    return number(*n, ctx + "." + std::string(key));
}

std::vector<double> number_list(const toml::node& n, const std::string& what) {
    const toml::array* a = n.as_array();
    if (!a) throw ValidationError(what + " must be an array");
    std::vector<double> out;
    for (const auto& e : *a) out.push_back(number(e, what));
    return out;
}

std::vector<double> parse_grid(const toml::node& n, const std::string& what) {
    if (n.is_array()) return number_list(n, what);
    const toml::table* t = n.as_table();
    if (!t) throw ValidationError(what + " must be a list or {start, stop, points}");
    const double a = number_at(*t, "start", what);
    const double b = number_at(*t, "stop", what);
    const auto points = (*t)["points"].value<std::int64_t>();
    if (!points || *points < 1) throw ValidationError(what + ".points must be a positive integer");
    std::vector<double> out(static_cast<std::size_t>(*points));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = out.size() == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(out.size() - 1);
    return out;
}

AttenuationChain* chain_of(NoiseChannel& ch) {
    if (auto* x = std::get_if<ChargeLine>(&ch)) return &x->chain;
    if (auto* x = std::get_if<FluxLine>(&ch)) return &x->chain;
    return nullptr;
}

NoiseChannel parse_channel(const toml::table& t, std::size_t index, std::vector<FreeParameter>& free) {
    const std::string ctx = "channel[" + std::to_string(index) + "]";
    const auto type = t["type"].value<std::string>();
    if (!type) throw ValidationError(ctx + ": missing 'type'");
    NoiseChannel ch = make_channel(*type);
    for (const auto& [k, node] : t) {
        const std::string key(k.str());
        if (key == "type") continue;
        if (key == "free") {
            const toml::array* a = node.as_array();
            if (!a) throw ValidationError(ctx + ".free must be an array of names");
            for (const auto& e : *a) {
                const auto name = e.value<std::string>();
                if (!name) throw ValidationError(ctx + ".free must hold strings");
                (void)channel_parameter(ch, *name);
                free.push_back({.channel = index, .field = *name});
            }
        } else if (key == "scale_with_temperature") {
            auto* fn = std::get_if<FluxNoise>(&ch);
            const auto flag = node.value<bool>();
            if (!fn || !flag) throw ValidationError(ctx + ": scale_with_temperature is a flux_noise boolean");
            fn->scale_with_temperature = *flag;
        } else if (key == "chain" || key == "source_temperature") {
            AttenuationChain* chain = chain_of(ch);
            if (!chain) throw ValidationError(ctx + ": '" + key + "' applies to line channels only");
            if (key == "source_temperature") {
                chain->source_temperature = number(node, ctx + ".source_temperature");
                continue;
            }
            const toml::array* a = node.as_array();
            if (!a) throw ValidationError(ctx + ".chain must be [[db, kelvin], ...]");
            chain->stages.clear();
            for (const auto& st : *a) {
                const auto v = number_list(st, ctx + ".chain stage");
                if (v.size() != 2) throw ValidationError(ctx + ".chain stages are [db, kelvin] pairs");
                chain->stages.push_back({v[0], v[1]});
            }
        } else {
            set_channel_parameter(ch, key, number(node, ctx + "." + key));
        }
    }
    validate_channel(ch);
    return ch;
}

RunConfig from_table(const toml::table& root) {
    RunConfig c;
    const auto* circuit = root["circuit"].as_table();
    if (!circuit) throw ValidationError("config: missing [circuit]");
    c.circuit.e_c = number_at(*circuit, "e_c", "circuit");
    c.circuit.e_j = number_at(*circuit, "e_j", "circuit");
    c.circuit.e_l = number_at(*circuit, "e_l", "circuit");

    if (const auto* lv = root["levels"].as_table()) {
        const std::string mode = (*lv)["mode"].value_or(std::string("n"));
        if (mode == "two") c.level_mode = LevelMode::two;
        else if (mode == "n") c.level_mode = LevelMode::n;
        else throw ValidationError("levels.mode must be \"two\" or \"n\"");
        if (const toml::node* n = lv->get("n")) {
            const auto v = n->value<std::int64_t>();
            if (!v) throw ValidationError("levels.n must be an integer");
            c.n_levels = static_cast<int>(*v);
        }
    }

    if (const auto* sw = root["sweep"].as_table()) {
        if (const toml::node* n = sw->get("flux")) c.flux_grid = parse_grid(*n, "sweep.flux");
        if (const toml::node* n = sw->get("temperatures")) c.temperatures = parse_grid(*n, "sweep.temperatures");
        if (const toml::node* n = sw->get("fields")) c.fields = parse_grid(*n, "sweep.fields");
    }
    if (c.flux_grid.empty()) c.flux_grid = {0.5};

    if (const auto* f = root["field"].as_table()) {
        FieldModelParams fm;
        fm.ej0 = number_at(*f, "ej0", "field", c.circuit.e_j);
        fm.b_delta = number_at(*f, "b_delta", "field", 0.0);
        fm.b_phi0 = number_at(*f, "b_phi0", "field");
        fm.b_c = number_at(*f, "b_c", "field");
        fm.gap_delta0 = number_at(*f, "gap_delta0", "field", constants::aluminium_gap);
        fm.x_qp0 = number_at(*f, "x_qp0", "field", 0.0);
        c.field_model = fm;
    }

    if (const toml::node* s = root.get("seed")) {
        const auto v = s->value<std::int64_t>();
        if (!v || *v < 0) throw ValidationError("seed must be a non-negative integer");
        c.seed = static_cast<std::uint64_t>(*v);
    }
    if (const auto* o = root["output"].as_table()) c.output_dir = (*o)["dir"].value_or(std::string("."));

    if (const toml::node* chs = root.get("channel")) {
        const toml::array* a = chs->as_array();
        if (!a) throw ValidationError("config: channel must be an array of tables ([[channel]])");
        for (const auto& e : *a) {
            const toml::table* t = e.as_table();
            if (!t) throw ValidationError("config: channel entries must be tables");
            c.channels.push_back(parse_channel(*t, c.channels.size(), c.free));
        }
    }
    c.validate();
    return c;
}

}  // namespace

void RunConfig::validate() const {
    circuit.validate();
    if (n_levels < 2) throw ValidationError("config: levels.n must be >= 2");
    if (flux_grid.empty() || temperatures.empty() || fields.empty())
        throw ValidationError("config: sweep grids must be nonempty");
    for (double t : temperatures)
        if (!(t > 0.0)) throw ValidationError("config: temperatures must be positive");
    for (const auto& ch : channels) validate_channel(ch);
    for (const auto& f : free)
        if (f.channel >= channels.size()) throw ValidationError("config: free parameter refers to a missing channel");
    if (field_model) field_model->validate();
}

NoiseChannel make_channel(std::string_view type) {
    if (type == "flux_noise") return FluxNoise{};
    if (type == "dielectric") return Dielectric{};
    if (type == "inductive") return Inductive{};
    if (type == "qp_junction") return QpJunction{};
    if (type == "qp_array") return QpArray{};
    if (type == "purcell") return PurcellChannel{};
    if (type == "charge_line") return ChargeLine{};
    if (type == "flux_line") return FluxLine{};
    if (type == "phenom_power_law") return PhenomPowerLaw{};
    throw ValidationError("unknown channel type '" + std::string(type) + "'");
}

RunConfig parse_config(std::string_view toml_text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(toml_text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ":" << e.source().begin.line << ": " << e.description();
        throw ValidationError(os.str());
    }
    return from_table(root);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string to_toml(const RunConfig& c) {
    std::ostringstream os;
    auto list = [&](const std::vector<double>& v) {
        os << '[';
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << full(v[i]);
        os << "]\n";
    };
    os << "seed = " << c.seed << "\n\n[circuit]\n";
    os << "e_c = " << full(c.circuit.e_c) << "\ne_j = " << full(c.circuit.e_j) << "\ne_l = " << full(c.circuit.e_l)
       << "\n\n[levels]\nmode = " << quoted(c.level_mode == LevelMode::two ? "two" : "n") << "\nn = " << c.n_levels
       << "\n\n[sweep]\nflux = ";
    list(c.flux_grid);
    os << "temperatures = ";
    list(c.temperatures);
    os << "fields = ";
    list(c.fields);
    if (c.field_model) {
        const auto& f = *c.field_model;
        os << "\n[field]\nej0 = " << full(f.ej0) << "\nb_delta = " << full(f.b_delta) << "\nb_phi0 = " << full(f.b_phi0)
           << "\nb_c = " << full(f.b_c) << "\ngap_delta0 = " << full(f.gap_delta0) << "\nx_qp0 = " << full(f.x_qp0)
           << '\n';
    }
    os << "\n[output]\ndir = " << quoted(c.output_dir) << '\n';
    for (std::size_t i = 0; i < c.channels.size(); ++i) {
        const auto& ch = c.channels[i];
        os << "\n[[channel]]\ntype = " << quoted(channel_name(ch)) << '\n';
        for (const auto& name : channel_parameter_names(ch)) os << name << " = " << full(channel_parameter(ch, name)) << '\n';
        if (const auto* fn = std::get_if<FluxNoise>(&ch))
            os << "scale_with_temperature = " << (fn->scale_with_temperature ? "true" : "false") << '\n';
        NoiseChannel copy = ch;
        if (const AttenuationChain* chain = chain_of(copy)) {
            os << "source_temperature = " << full(chain->source_temperature) << "\nchain = [";
            for (std::size_t s = 0; s < chain->stages.size(); ++s)
                os << (s ? ", " : "") << '[' << full(chain->stages[s].attenuation_db) << ", "
                   << full(chain->stages[s].temperature) << ']';
            os << "]\n";
        }
        std::vector<std::string> names;
        for (const auto& f : c.free)
            if (f.channel == i) names.push_back(quoted(f.field));
        if (!names.empty()) {
            os << "free = [";
            for (std::size_t k = 0; k < names.size(); ++k) os << (k ? ", " : "") << names[k];
            os << "]\n";
        }
    }
    return os.str();
}

std::string config_hash(const RunConfig& config) { return hex64(fnv1a64(to_toml(config))); }

std::string baseline_config_toml() {
    return R"(seed = 7

[circuit]
e_c = 0.957e9
e_j = 6.814e9
e_l = 0.560e9

[levels]
mode = "n"
n = 6

[sweep]
flux = { start = 0.0, stop = 0.5, points = 101 }
temperatures = [0.05]
fields = [0.0]

[field]
ej0 = 6.814e9
b_delta = 2.2
b_phi0 = 857.0
b_c = 487.0

[output]
dir = "out"

[[channel]]
type = "flux_noise"
a_phi = 6.25e-14
alpha = 0.62
t_bath = 0.05

[[channel]]
type = "dielectric"
tan_delta0 = 4e-6
epsilon = 0.26
omega_ref = 3.7699111843077517e10
t_eff = 0.05

[[channel]]
type = "purcell"
f_res = 7.439e9
g = 124.6e6
q_factor = 1.93e5
z0 = 50.0
t_res = 0.07
coupling_exponent = 1.0

[[channel]]
type = "qp_junction"
x_qp = 1e-7
t = 0.05
)";
}

RunConfig baseline_config() { return parse_config(baseline_config_toml(), "baseline"); }

CompositeFitSpec fit_spec(const RunConfig& config) {
    CompositeFitSpec spec;
    spec.circuit = config.circuit;
    spec.channels = config.channels;
    spec.free = config.free;
    spec.level_mode = config.level_mode;
    spec.n_levels = config.n_levels;
    return spec;
}

}  // namespace fluxonium
