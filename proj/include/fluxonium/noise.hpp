// noise.hpp: loss channels, their noise spectra and golden-rule rates.
//
// Every channel couples through an operator D = c * O, with O one of
// phi, n, sin(phi/2) or phi/2, and a symmetrized spectrum S of the noise
// variable. The symmetrized rate of a transition is
//
//   Gamma = (2 / hbar^2) |c <i|O|j>|^2 S(omega)
//
// and detailed balance at the channel temperature splits it into a
// downward and an upward part.
//
// Spectrum units per noise variable:
//   flux (FluxNoise, Inductive, FluxLine)       Phi0^2 / Hz, c in J / Phi0
//   charge (Dielectric, ChargeLine, Purcell)    C^2 / Hz,    c in J / C
//   current (QpJunction, QpArray)               A^2 / Hz,    c in J / A

#pragma once

#include "fluxonium/constants.hpp"
#include "fluxonium/spectrum.hpp"

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace fluxonium {

struct AttenuationStage {
    double attenuation_db{0.0};
    double temperature{0.0};  // K
};

struct AttenuationChain {
    std::vector<AttenuationStage> stages;
    double source_temperature{300.0};  // K

    void validate() const;

    /// 30 dB split over the 3 K, still and mixing-chamber plates.
    static AttenuationChain default_drive_line();
};

/// Photon occupation after the chain at angular frequency omega.
double attenuated_photon_number(const AttenuationChain& chain, double omega);

/// 1/f^alpha flux noise, S = a_phi (2 pi / omega)^alpha in Phi0^2/Hz.
/// With scale_with_temperature, a_phi is taken at t_ref and scaled as T/t_ref.
struct FluxNoise {
    double a_phi{0.0};
    double alpha{1.0};
    double t_bath{0.05};
    bool scale_with_temperature{false};
    double t_ref{0.036};

    [[nodiscard]] double amplitude() const;
};

struct Dielectric {
    double tan_delta0{0.0};
    double epsilon{0.0};
    double omega_ref{constants::two_pi * 6e9};
    double t_eff{0.05};
};

struct Inductive {
    double q_l{0.0};
    double t_eff{0.05};
};

struct QpJunction {
    double x_qp{0.0};
    double gap{constants::aluminium_gap};
    double t{0.05};
};

struct QpArray {
    double x_qpa{0.0};
    double gap{constants::aluminium_gap};
    double t{0.05};
};

/// Decay through the readout resonator. coupling_exponent is the power of
/// C_c / C_Sigma in the rate.
struct PurcellChannel {
    ResonatorParams res;
    double t_res{0.07};
    double coupling_exponent{1.0};
};

struct ChargeLine {
    double c_d{0.0};
    double z0{50.0};
    AttenuationChain chain{AttenuationChain::default_drive_line()};
};

/// l_total <= 0 selects the circuit inductance (Phi0 / 2 pi)^2 / E_L.
struct FluxLine {
    double m_d{0.0};
    double z0{50.0};
    AttenuationChain chain{AttenuationChain::default_drive_line()};
    double l_total{0.0};
};

/// Two-level power-law model of the normalized rate Gamma1 / |n01|^2 with
/// S_Phi = a omega^-alpha T^beta1 (Wb^2 s) and S_Q = b omega^gamma T^beta2
/// (C^2 s); omega in rad/s, T in K.
struct PhenomPowerLaw {
    double a{0.0};
    double alpha{1.0};
    double beta1{0.0};
    double b{0.0};
    double gamma{0.0};
    double beta2{0.0};
    double t{0.05};
};

using NoiseChannel = std::variant<FluxNoise, Dielectric, Inductive, QpJunction, QpArray,
                                  PurcellChannel, ChargeLine, FluxLine, PhenomPowerLaw>;

std::string channel_name(const NoiseChannel& ch);

/// Numeric fields of a channel by name, e.g. "a_phi" or "tan_delta0".
std::vector<std::string> channel_parameter_names(const NoiseChannel& ch);
double channel_parameter(const NoiseChannel& ch, const std::string& field);
void set_channel_parameter(NoiseChannel& ch, const std::string& field, double value);

/// Checks magnitudes and temperatures. Throws ValidationError.
void validate_channel(const NoiseChannel& ch);

/// Temperature that sets the up/down asymmetry of the channel.
double channel_temperature(const NoiseChannel& ch, double omega);

/// Channel with every temperature replaced by t (bath, t_eff, t_res ...).
/// Drive-line chains are left untouched.
NoiseChannel with_temperature(const NoiseChannel& ch, double t);

/// Coupling operator of the channel.
Operator coupling_operator(const NoiseChannel& ch);

/// Prefactor c of D = c * O (see the header notes for units).
double coupling_strength(const NoiseChannel& ch, const CircuitParams& circuit);

/// Symmetrized spectrum at omega > 0 (units per noise variable above).
/// PhenomPowerLaw has no spectrum of its own and throws.
double symmetrized_psd(const NoiseChannel& ch, const CircuitParams& circuit, double omega);

struct TransitionRates {
    double forward{0.0};   // i -> j
    double backward{0.0};  // j -> i
};

/// Gamma1 / |n01|^2 of the power-law model at omega (rad/s) and t (K).
double phenom_normalized_rate(const PhenomPowerLaw& m, const CircuitParams& circuit, double omega,
                              double t);

/// Golden-rule rates between levels i and j of sol.
TransitionRates transition_rates(const NoiseChannel& ch, const EigenSolution& sol, int i, int j);

struct ChannelRate {
    std::string name;
    double gamma{0.0};  // Gamma_up + Gamma_down, 1/s
};

struct Gamma1Breakdown {
    double gamma1{0.0};
    std::vector<ChannelRate> channels;

    [[nodiscard]] double t1() const { return 1.0 / gamma1; }
};

Gamma1Breakdown gamma1_two_level(const std::vector<NoiseChannel>& channels,
                                 const EigenSolution& sol);

/// Input impedance of the lambda/4 readout filter seen from the qubit.
std::complex<double> purcell_input_impedance(const ResonatorParams& res, double omega);

/// Qubit-resonator coupling capacitance relative to C_Sigma.
double purcell_coupling_ratio(const ResonatorParams& res, const CircuitParams& circuit);

/// Dissipative admittance of a tunnel junction with quasiparticle density
/// x_qp, divided by its Josephson energy in J (S / J).
double qp_admittance_per_ej(double omega, double x_qp, double gap, double t);

/// x_qp^0 + sqrt(2 pi k T / gap) exp(-gap / k T).
double thermal_qp_density(double gap, double t, double x_qp0 = 0.0);

/// Inductive quality factor that mimics flux noise (a_phi, alpha) at f (Hz).
double effective_inductive_q(double e_l, double a_phi, double alpha, double t, double f);

}  // namespace fluxonium
