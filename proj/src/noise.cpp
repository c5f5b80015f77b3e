// noise.cpp: channel spectra and golden-rule rates.

#include "fluxonium/noise.hpp"

#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/special_functions.hpp"

#include <cmath>
#include <sstream>

namespace fluxonium {

namespace c = constants;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

bool is_line(const NoiseChannel& ch) {
    return std::holds_alternative<ChargeLine>(ch) || std::holds_alternative<FluxLine>(ch);
}

const AttenuationChain& line_chain(const NoiseChannel& ch) {
    if (const auto* cl = std::get_if<ChargeLine>(&ch)) return cl->chain;
    return std::get<FluxLine>(ch).chain;
}

// exp(-hbar omega / k T) for thermal channels, n / (n + 1) for drive lines.
double boltzmann_factor(const NoiseChannel& ch, double omega) {
    if (is_line(ch)) {
        const double n = attenuated_photon_number(line_chain(ch), omega);
        return n / (n + 1.0);
    }
    return std::exp(-boltzmann_exponent(omega, channel_temperature(ch, omega)));
}

double charging_energy_j(const CircuitParams& p) { return hz_to_joule(p.e_c); }
double inductive_energy_j(const CircuitParams& p) { return hz_to_joule(p.e_l); }

double sum_capacitance(const CircuitParams& p) {
    return c::e * c::e / (2.0 * charging_energy_j(p));
}

// Re Y_QP / E_J without the K0(y) sinh(y) factor.
double qp_admittance_envelope(double omega, double x_qp, double gap, double t) {
    require(omega > 0.0 && gap > 0.0 && t > 0.0, "qp_admittance: positive omega, gap, t required");
    const double y = boltzmann_exponent(omega, t) / 2.0;
    return std::sqrt(2.0 / c::pi) * 8.0 / (c::r_k * gap) *
           std::pow(2.0 * gap / (c::hbar * omega), 1.5) * x_qp * std::sqrt(y);
}

}  // namespace

void AttenuationChain::validate() const {
    require(source_temperature > 0.0, "AttenuationChain: source temperature must be positive");
    for (const auto& s : stages) {
        require(s.attenuation_db >= 0.0, "AttenuationChain: attenuation must be >= 0 dB");
        require(s.temperature > 0.0, "AttenuationChain: stage temperature must be positive");
    }
}

AttenuationChain AttenuationChain::default_drive_line() {
    return {{{10.0, 3.0}, {10.0, 0.8}, {10.0, 0.035}}, 300.0};
}

double attenuated_photon_number(const AttenuationChain& chain, double omega) {
    chain.validate();
    require(omega > 0.0, "attenuated_photon_number: omega must be positive");
    double n = bose_occupation(omega, chain.source_temperature);
    for (const auto& s : chain.stages) {
        const double a = std::pow(10.0, s.attenuation_db / 10.0);
        n = n / a + (a - 1.0) / a * bose_occupation(omega, s.temperature);
    }
    return n;
}

double FluxNoise::amplitude() const {
    return scale_with_temperature ? a_phi * t_bath / t_ref : a_phi;
}

std::string channel_name(const NoiseChannel& ch) {
    return std::visit(overloaded{
                          [](const FluxNoise&) { return std::string("flux_noise"); },
                          [](const Dielectric&) { return std::string("dielectric"); },
                          [](const Inductive&) { return std::string("inductive"); },
                          [](const QpJunction&) { return std::string("qp_junction"); },
                          [](const QpArray&) { return std::string("qp_array"); },
                          [](const PurcellChannel&) { return std::string("purcell"); },
                          [](const ChargeLine&) { return std::string("charge_line"); },
                          [](const FluxLine&) { return std::string("flux_line"); },
                          [](const PhenomPowerLaw&) { return std::string("phenom_power_law"); },
                      },
                      ch);
}

namespace {

using FieldTable = std::vector<std::pair<const char*, double*>>;

FieldTable field_table(NoiseChannel& ch) {
    return std::visit(
        overloaded{
            [](FluxNoise& x) -> FieldTable {
                return {{"a_phi", &x.a_phi}, {"alpha", &x.alpha}, {"t_bath", &x.t_bath}, {"t_ref", &x.t_ref}};
            },
            [](Dielectric& x) -> FieldTable {
                return {{"tan_delta0", &x.tan_delta0}, {"epsilon", &x.epsilon},
                        {"omega_ref", &x.omega_ref}, {"t_eff", &x.t_eff}};
            },
            [](Inductive& x) -> FieldTable { return {{"q_l", &x.q_l}, {"t_eff", &x.t_eff}}; },
            [](QpJunction& x) -> FieldTable { return {{"x_qp", &x.x_qp}, {"gap", &x.gap}, {"t", &x.t}}; },
            [](QpArray& x) -> FieldTable { return {{"x_qpa", &x.x_qpa}, {"gap", &x.gap}, {"t", &x.t}}; },
            [](PurcellChannel& x) -> FieldTable {
                return {{"f_res", &x.res.f_res}, {"g", &x.res.g}, {"q_factor", &x.res.q_factor},
                        {"z0", &x.res.z0}, {"t_res", &x.t_res}, {"coupling_exponent", &x.coupling_exponent}};
            },
            [](ChargeLine& x) -> FieldTable { return {{"c_d", &x.c_d}, {"z0", &x.z0}}; },
            [](FluxLine& x) -> FieldTable { return {{"m_d", &x.m_d}, {"z0", &x.z0}, {"l_total", &x.l_total}}; },
            [](PhenomPowerLaw& x) -> FieldTable {
                return {{"a", &x.a}, {"alpha", &x.alpha}, {"beta1", &x.beta1}, {"b", &x.b},
                        {"gamma", &x.gamma}, {"beta2", &x.beta2}, {"t", &x.t}};
            },
        },
        ch);
}

double* find_field(NoiseChannel& ch, const std::string& field) {
    for (auto& [name, ptr] : field_table(ch))
        if (field == name) return ptr;
    throw ValidationError("channel " + channel_name(ch) + " has no parameter '" + field + "'");
}

}  // namespace

std::vector<std::string> channel_parameter_names(const NoiseChannel& ch) {
    NoiseChannel copy = ch;
    std::vector<std::string> out;
    for (auto& [name, ptr] : field_table(copy)) out.emplace_back(name);
    return out;
}

double channel_parameter(const NoiseChannel& ch, const std::string& field) {
    NoiseChannel copy = ch;
    return *find_field(copy, field);
}

void set_channel_parameter(NoiseChannel& ch, const std::string& field, double value) {
    *find_field(ch, field) = value;
}

void validate_channel(const NoiseChannel& ch) {
    std::visit(overloaded{
                   [](const FluxNoise& x) {
                       require(x.a_phi >= 0.0, "FluxNoise: a_phi must be >= 0");
                       require(x.alpha > 0.0 && x.alpha < 3.0, "FluxNoise: alpha must be in (0, 3)");
                       require(x.t_bath > 0.0 && x.t_ref > 0.0, "FluxNoise: temperatures must be positive");
                   },
                   [](const Dielectric& x) {
                       require(x.tan_delta0 >= 0.0, "Dielectric: tan_delta0 must be >= 0");
                       require(x.omega_ref > 0.0, "Dielectric: omega_ref must be positive");
                       require(x.t_eff > 0.0, "Dielectric: t_eff must be positive");
                   },
                   [](const Inductive& x) {
                       require(x.q_l > 0.0, "Inductive: q_l must be positive");
                       require(x.t_eff > 0.0, "Inductive: t_eff must be positive");
                   },
                   [](const QpJunction& x) {
                       require(x.x_qp >= 0.0 && x.gap > 0.0, "QpJunction: x_qp >= 0 and gap > 0 required");
                       require(x.t > 0.0, "QpJunction: t must be positive");
                   },
                   [](const QpArray& x) {
                       require(x.x_qpa >= 0.0 && x.gap > 0.0, "QpArray: x_qpa >= 0 and gap > 0 required");
                       require(x.t > 0.0, "QpArray: t must be positive");
                   },
                   [](const PurcellChannel& x) {
                       x.res.validate();
                       require(x.t_res > 0.0, "PurcellChannel: t_res must be positive");
                       require(x.coupling_exponent > 0.0, "PurcellChannel: exponent must be positive");
                   },
                   [](const ChargeLine& x) {
                       require(x.c_d >= 0.0 && x.z0 > 0.0, "ChargeLine: c_d >= 0 and z0 > 0 required");
                       x.chain.validate();
                   },
                   [](const FluxLine& x) {
                       require(x.m_d >= 0.0 && x.z0 > 0.0, "FluxLine: m_d >= 0 and z0 > 0 required");
                       x.chain.validate();
                   },
                   [](const PhenomPowerLaw& x) {
                       require(x.a >= 0.0 && x.b >= 0.0, "PhenomPowerLaw: a, b must be >= 0");
                       require(x.alpha > 0.0 && x.alpha < 3.0, "PhenomPowerLaw: alpha must be in (0, 3)");
                       require(x.t > 0.0, "PhenomPowerLaw: t must be positive");
                   },
               },
               ch);
}

double channel_temperature(const NoiseChannel& ch, double omega) {
    return std::visit(
        overloaded{
            [](const FluxNoise& x) { return x.t_bath; },
            [](const Dielectric& x) { return x.t_eff; },
            [](const Inductive& x) { return x.t_eff; },
            [](const QpJunction& x) { return x.t; },
            [](const QpArray& x) { return x.t; },
            [](const PurcellChannel& x) { return x.t_res; },
            [omega](const ChargeLine& x) {
                const double n = attenuated_photon_number(x.chain, omega);
                return c::hbar * omega / (c::k_b * std::log1p(1.0 / n));
            },
            [omega](const FluxLine& x) {
                const double n = attenuated_photon_number(x.chain, omega);
                return c::hbar * omega / (c::k_b * std::log1p(1.0 / n));
            },
            [](const PhenomPowerLaw& x) { return x.t; },
        },
        ch);
}

NoiseChannel with_temperature(const NoiseChannel& ch, double t) {
    NoiseChannel out = ch;
    std::visit(overloaded{
                   [t](FluxNoise& x) { x.t_bath = t; },
                   [t](Dielectric& x) { x.t_eff = t; },
                   [t](Inductive& x) { x.t_eff = t; },
                   [t](QpJunction& x) { x.t = t; },
                   [t](QpArray& x) { x.t = t; },
                   [t](PurcellChannel& x) { x.t_res = t; },
                   [](ChargeLine&) {},
                   [](FluxLine&) {},
                   [t](PhenomPowerLaw& x) { x.t = t; },
               },
               out);
    return out;
}

Operator coupling_operator(const NoiseChannel& ch) {
    return std::visit(overloaded{
                          [](const FluxNoise&) { return Operator::phi; },
                          [](const Dielectric&) { return Operator::n; },
                          [](const Inductive&) { return Operator::phi; },
                          [](const QpJunction&) { return Operator::sin_half_phi; },
                          [](const QpArray&) { return Operator::phi; },
                          [](const PurcellChannel&) { return Operator::n; },
                          [](const ChargeLine&) { return Operator::n; },
                          [](const FluxLine&) { return Operator::phi; },
                          [](const PhenomPowerLaw&) { return Operator::n; },
                      },
                      ch);
}

double coupling_strength(const NoiseChannel& ch, const CircuitParams& circuit) {
    const double flux = c::two_pi * inductive_energy_j(circuit);  // J per Phi0
    const double charge = 4.0 * charging_energy_j(circuit) / c::e;
    return std::visit(overloaded{
                          [&](const FluxNoise&) { return flux; },
                          [&](const Dielectric&) { return charge; },
                          [&](const Inductive&) { return flux; },
                          [](const QpJunction&) { return c::phi0 / c::pi; },
                          [](const QpArray&) { return c::phi0 / (2.0 * c::pi); },
                          [&](const PurcellChannel&) { return charge; },
                          [&](const ChargeLine&) { return charge; },
                          [&](const FluxLine&) { return flux; },
                          [](const PhenomPowerLaw&) -> double {
                              throw ValidationError(
                                  "PhenomPowerLaw is a two-level rate model without a coupling");
                          },
                      },
                      ch);
}

double qp_admittance_per_ej(double omega, double x_qp, double gap, double t) {
    const double y = boltzmann_exponent(omega, t) / 2.0;
    return qp_admittance_envelope(omega, x_qp, gap, t) * bessel_k0_sinh(y);
}

double thermal_qp_density(double gap, double t, double x_qp0) {
    require(gap > 0.0 && t > 0.0, "thermal_qp_density: positive gap and t required");
    const double kt = c::k_b * t;
    return x_qp0 + std::sqrt(2.0 * c::pi * kt / gap) * std::exp(-gap / kt);
}

std::complex<double> purcell_input_impedance(const ResonatorParams& res, double omega) {
    res.validate();
    require(omega > 0.0, "purcell_input_impedance: omega must be positive");
    const double omega_r = c::two_pi * res.f_res;
    const double z0 = res.z0;
    const double m = z0 / omega_r * std::sqrt(c::pi / (2.0 * res.q_factor));
    const double a = omega * omega * m * m;
    // Numerator and denominator multiplied by sin(x) so that no cot is formed.
    const double x = c::pi * omega / (2.0 * omega_r);
    const double s = std::sin(x);
    const double co = std::cos(x);
    const double z02 = z0 * z0;
    const double den = 4.0 * z02 * z02 * co * co + a * a * s * s;
    const double re = 2.0 * z02 * z0 * a / den;
    const double im = z0 * s * co * (4.0 * z02 * z02 - a * a) / den;
    return {re, im};
}

double purcell_coupling_ratio(const ResonatorParams& res, const CircuitParams&) {
    res.validate();
    const double omega_r = c::two_pi * res.f_res;
    const double g = c::two_pi * res.g;
    return c::hbar * g / (2.0 * omega_r * c::e) * std::sqrt(c::pi / (2.0 * c::hbar * res.z0));
}

double symmetrized_psd(const NoiseChannel& ch, const CircuitParams& circuit, double omega) {
    validate_channel(ch);
    require(omega > 0.0, "symmetrized_psd: omega must be positive");
    const double el = inductive_energy_j(circuit);
    const double ec = charging_energy_j(circuit);
    const double ej = hz_to_joule(circuit.e_j);
    const double hw = c::hbar * omega;
    return std::visit(
        overloaded{
            [&](const FluxNoise& x) { return x.amplitude() * std::pow(c::two_pi / omega, x.alpha); },
            [&](const Dielectric& x) {
                const double tan_delta = x.tan_delta0 * std::pow(omega / x.omega_ref, x.epsilon);
                return c::e * c::e * c::hbar / (2.0 * ec) * tan_delta *
                       coth(boltzmann_exponent(omega, x.t_eff) / 2.0);
            },
            [&](const Inductive& x) {
                return c::hbar / (4.0 * c::pi * c::pi * el * x.q_l) *
                       coth(boltzmann_exponent(omega, x.t_eff) / 2.0);
            },
            [&](const QpJunction& x) {
                const double y = boltzmann_exponent(omega, x.t) / 2.0;
                return hw * ej * qp_admittance_envelope(omega, x.x_qp, x.gap, x.t) *
                       bessel_k0_cosh(y);
            },
            [&](const QpArray& x) {
                const double y = boltzmann_exponent(omega, x.t) / 2.0;
                return hw * el * qp_admittance_envelope(omega, x.x_qpa, x.gap, x.t) *
                       bessel_k0_cosh(y);
            },
            [&](const PurcellChannel& x) {
                const double csum = sum_capacitance(circuit);
                const double beta = purcell_coupling_ratio(x.res, circuit);
                return csum * csum * std::pow(beta, x.coupling_exponent) * hw *
                       purcell_input_impedance(x.res, omega).real() *
                       coth(boltzmann_exponent(omega, x.t_res) / 2.0);
            },
            [&](const ChargeLine& x) {
                const double n = attenuated_photon_number(x.chain, omega);
                return x.c_d * x.c_d * x.z0 * hw * (2.0 * n + 1.0);
            },
            [&](const FluxLine& x) {
                const double n = attenuated_photon_number(x.chain, omega);
                const double l = x.l_total > 0.0 ? x.l_total : c::reduced_phi0 * c::reduced_phi0 / el;
                const double k = omega * x.m_d * x.m_d / l;
                const double re_y = x.z0 / (x.z0 * x.z0 + k * k);
                return x.m_d * x.m_d * hw * re_y * (2.0 * n + 1.0) / (c::phi0 * c::phi0);
            },
            [](const PhenomPowerLaw&) -> double {
                throw ValidationError("PhenomPowerLaw defines a two-level rate, not a spectrum");
            },
        },
        ch);
}

double phenom_normalized_rate(const PhenomPowerLaw& m, const CircuitParams& p, double omega,
                              double t) {
    require(omega > 0.0 && t > 0.0, "phenom_normalized_rate: positive omega and t required");
    const double ec = charging_energy_j(p);
    const double el = inductive_energy_j(p);
    const double flux_pref = 8.0 * ec * el / (c::hbar * c::hbar * c::reduced_phi0);
    const double charge_pref = 4.0 * ec / (c::e * c::hbar);
    return flux_pref * flux_pref * m.a * std::pow(omega, -m.alpha - 2.0) * std::pow(t, m.beta1) +
           charge_pref * charge_pref * m.b * std::pow(omega, m.gamma) * std::pow(t, m.beta2);
}

TransitionRates transition_rates(const NoiseChannel& ch, const EigenSolution& sol, int i, int j) {
    if (i == j) throw ValidationError("transition_rates: i and j must differ");
    const double omega_signed = sol.angular_frequency(i, j);
    const double omega = std::abs(omega_signed);
    if (!(omega > 0.0)) {
        std::ostringstream os;
        os << "transition_rates: levels " << i << " and " << j << " are degenerate";
        throw NumericalError(os.str());
    }
    validate_channel(ch);

    double gamma_sym = 0.0;
    if (const auto* m = std::get_if<PhenomPowerLaw>(&ch)) {
        if (!((i == 0 && j == 1) || (i == 1 && j == 0)))
            throw ValidationError("PhenomPowerLaw is defined for the 0-1 transition only");
        const double n01 = sol.magnitude(Operator::n, 0, 1);
        gamma_sym = n01 * n01 * phenom_normalized_rate(*m, sol.params(), omega, m->t);
    } else {
        const double coupling =
            coupling_strength(ch, sol.params()) * sol.magnitude(coupling_operator(ch), i, j);
        gamma_sym = 2.0 / (c::hbar * c::hbar) * coupling * coupling *
                    symmetrized_psd(ch, sol.params(), omega);
    }

    const double b = boltzmann_factor(ch, omega);
    const double down = gamma_sym / (1.0 + b);
    const double up = gamma_sym * b / (1.0 + b);
    // forward is i -> j; it is the upward rate when j lies above i.
    return omega_signed > 0.0 ? TransitionRates{up, down} : TransitionRates{down, up};
}

Gamma1Breakdown gamma1_two_level(const std::vector<NoiseChannel>& channels,
                                 const EigenSolution& sol) {
    if (channels.empty()) throw ValidationError("gamma1_two_level: empty channel list");
    if (sol.levels() < 2) throw ValidationError("gamma1_two_level: need at least 2 levels");
    Gamma1Breakdown out;
    for (const auto& ch : channels) {
        const auto r = transition_rates(ch, sol, 0, 1);
        const double g = r.forward + r.backward;
        out.channels.push_back({channel_name(ch), g});
        out.gamma1 += g;
    }
    return out;
}

double effective_inductive_q(double e_l, double a_phi, double alpha, double t, double f) {
    require(e_l > 0.0 && a_phi > 0.0 && t > 0.0 && f > 0.0,
            "effective_inductive_q: positive inputs required");
    const double inv = 4.0 * c::pi * c::pi * c::pi * hz_to_joule(e_l) / (c::k_b * t) *
                       std::pow(f, 1.0 - alpha) * a_phi;
    return 1.0 / inv;
}

}  // namespace fluxonium
