// dephasing.hpp: spin-echo coherence under 1/f^alpha flux noise, echo trace
// fits, A_Phi extraction against flux sensitivity, and spin-locking PSDs.

#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace fluxonium {

/// Dimensionless echo prefactor, chi = t^(1+alpha) slope^2 A_Phi z(alpha).
/// Defined for 0 < alpha < 3; z(1) = ln 2.
double echo_prefactor(double alpha);

struct EchoModel {
    double a_phi{0.0};  // Phi0^2 at 1 Hz
    double alpha{1.0};
    double t1{std::numeric_limits<double>::infinity()};         // s
    double t_phi_exp{std::numeric_limits<double>::infinity()};  // s
    double slope{0.0};  // |d omega01 / d Phi|, rad/s per Phi0

    void validate() const;
};

/// chi(t) of the 1/f^alpha part alone.
double echo_coherence(const EchoModel& m, double t);

/// Full echo envelope exp(-t/2T1 - t/T_exp - chi(t)).
double echo_envelope(const EchoModel& m, double t);

/// Gamma~ = slope sqrt(A_Phi z), so chi = (Gamma~)^2 t^(1+alpha).
double echo_gamma_tilde(const EchoModel& m);

struct EchoFit {
    double amplitude{0.0};
    double t_phi_e{0.0};      // s, chi = (t / T_phi^E)^(1+alpha)
    double gamma_tilde{0.0};  // (T_phi^E)^(-(1+alpha)/2)
    double offset{0.0};
    double t_phi_exp{std::numeric_limits<double>::infinity()};
    double sigma_amplitude{0.0}, sigma_t_phi_e{0.0}, sigma_offset{0.0}, sigma_t_phi_exp{0.0};
    double sigma_gamma_tilde{0.0};
    bool rejected{false};
    double residual_norm{0.0};
};

/// Fits A exp[-t/2T1 - t/T_exp - (t/T_phi^E)^(1+alpha)] + C. T_exp is held
/// at t_phi_exp when given (infinity removes the term) and fitted otherwise.
EchoFit fit_echo_trace(const std::vector<double>& times, const std::vector<double>& values, double t1,
                       double alpha, std::optional<double> t_phi_exp);

struct EchoRecord {
    double slope{0.0};        // rad/s per Phi0
    double gamma_tilde{0.0};  // used when no trace is attached
    double sigma{0.0};
    // Raw trace, needed when T_exp is scanned.
    std::vector<double> times;
    std::vector<double> values;
    double t1{std::numeric_limits<double>::infinity()};

    [[nodiscard]] bool has_trace() const { return !times.empty(); }
};

struct EchoDataset {
    std::vector<EchoRecord> records;
    double temperature{0.0};  // K, informational
};

struct EchoExtraction {
    double a_phi{0.0};
    double sigma_a_phi{0.0};
    double line_slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
    std::optional<double> t_phi_exp;  // value used or chosen by the scan
    std::vector<double> gamma_tilde;  // per record
};

struct EchoExtractionOptions {
    // Traces are refit at this alpha; nullopt with traces scans T_exp.
    std::optional<double> t_phi_exp{std::numeric_limits<double>::infinity()};
    double scan_min{1e-6};  // s
    double scan_max{1e-1};
};

/// Line fit of Gamma~ against slope; A_Phi = line_slope^2 / z(alpha).
EchoExtraction extract_flux_noise_from_echo(const EchoDataset& ds, double alpha,
                                            const EchoExtractionOptions& opts = {});

/// S_Phi (Phi0^2/Hz) at the locking frequency from Gamma_1rho and Gamma_1.
double spinlock_flux_psd(double gamma_1rho, double gamma_1, double slope);

}  // namespace fluxonium
