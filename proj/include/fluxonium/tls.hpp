// tls.hpp: standard-tunneling-model loss tangents, resonant and
// phonon-limited relaxation branches.

#pragma once

namespace fluxonium {

struct TlsEnsemble {
    double p_density{0.0};  // states per (J m^3)
    double dipole{0.0};     // C m
    double eps_r{1.0};
    double n_c{1.0};        // critical photon number

    void validate() const;
};

struct PhononBath {
    double gamma_elastic{0.0};  // J
    double speed{0.0};          // m/s
    double density_d{0.0};      // kg / m^d
    int dim{3};

    void validate() const;
};

/// pi P |p|^2 / (3 eps0 eps_r) tanh(hbar omega / 2kT) / sqrt(1 + n / n_c).
double resonant_loss_tangent(const TlsEnsemble& ens, double omega, double n_bar, double t);

/// Phonon coupling constant xi, 1 / (s J^d).
double phonon_xi(const PhononBath& bath);

/// 1/tau_1 of a TLS with energy e and tunnelling energy delta0 (J) at t.
double tls_relaxation_rate(const PhononBath& bath, double e, double delta0, double t);

/// tau_1 at delta0 = e.
double tls_tau_min(const PhononBath& bath, double e, double t);

struct QuadratureOptions {
    double tolerance{1e-8};  // requested relative accuracy of each stage
    unsigned max_depth{18};
};

/// Relaxation loss tangent by double quadrature over E and u = tau_min / tau.
double relaxation_loss_tangent(const TlsEnsemble& ens, const PhononBath& bath, double omega, double t,
                               const QuadratureOptions& q = {});

struct AsymptoticLoss {
    double tan_delta{0.0};
    bool valid{true};  // omega tau_min(2kT) > 10
};

/// omega tau_min >> 1 limit, proportional to T^d / omega.
AsymptoticLoss relaxation_loss_asymptotic(const TlsEnsemble& ens, const PhononBath& bath, double omega,
                                          double t);

/// I_d = int_0^inf u^d sech^2(u) coth(u) du, cached per d.
double tls_moment(int d);

}  // namespace fluxonium
