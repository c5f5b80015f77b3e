// tls.cpp

#include "fluxonium/tls.hpp"

#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <mutex>
#include <sstream>

namespace fluxonium {

using boost::math::quadrature::gauss_kronrod;

namespace {

double sech2(double x) {
    if (std::abs(x) > 350.0) return 0.0;
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}

double dipole_strength(const TlsEnsemble& ens) {
    return ens.p_density * ens.dipole * ens.dipole / (constants::epsilon0 * ens.eps_r);
}

// Unit-sphere surface in d - 1 dimensions.
double sphere_surface(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return constants::two_pi;
        case 3: return 2.0 * constants::two_pi;
        default: throw ValidationError("PhononBath: dim must be 1, 2 or 3");
    }
}

}  // namespace

void TlsEnsemble::validate() const {
    if (!(p_density > 0.0) || !(dipole > 0.0) || !(eps_r > 0.0) || !(n_c > 0.0))
        throw ValidationError("TlsEnsemble: all fields must be positive");
}

void PhononBath::validate() const {
    if (dim < 1 || dim > 3) throw ValidationError("PhononBath: dim must be 1, 2 or 3");
    if (!(gamma_elastic > 0.0) || !(speed > 0.0) || !(density_d > 0.0))
        throw ValidationError("PhononBath: gamma, speed and density must be positive");
}

double resonant_loss_tangent(const TlsEnsemble& ens, double omega, double n_bar, double t) {
    ens.validate();
    if (!(omega > 0.0) || !(t > 0.0) || !(n_bar >= 0.0))
        throw ValidationError("resonant_loss_tangent: omega, t > 0 and n_bar >= 0 required");
    const double x = constants::hbar * omega / (2.0 * constants::k_b * t);
    return constants::pi * dipole_strength(ens) / 3.0 * std::tanh(x) / std::sqrt(1.0 + n_bar / ens.n_c);
}

double phonon_xi(const PhononBath& bath) {
    bath.validate();
    const int d = bath.dim;
    return bath.gamma_elastic * bath.gamma_elastic / std::pow(bath.speed, d + 2) * constants::pi *
           sphere_surface(d) / std::pow(constants::two_pi, d) /
           (std::pow(constants::hbar, d + 1) * bath.density_d);
}

double tls_relaxation_rate(const PhononBath& bath, double e, double delta0, double t) {
    if (!(e > 0.0) || !(delta0 > 0.0) || delta0 > e * (1.0 + 1e-12) || !(t > 0.0))
        throw ValidationError("tls_relaxation_rate: need 0 < delta0 <= e and t > 0");
    return phonon_xi(bath) * std::pow(e, bath.dim - 2) * delta0 * delta0 *
           coth(e / (2.0 * constants::k_b * t));
}

double tls_tau_min(const PhononBath& bath, double e, double t) {
    return 1.0 / tls_relaxation_rate(bath, e, e, t);
}

double relaxation_loss_tangent(const TlsEnsemble& ens, const PhononBath& bath, double omega, double t,
                               const QuadratureOptions& q) {
    ens.validate();
    bath.validate();
    if (!(omega > 0.0) || !(t > 0.0)) throw ValidationError("relaxation_loss_tangent: omega, t must be positive");
    const double kt2 = 2.0 * constants::k_b * t;
    const double xi = phonon_xi(bath);
    const int d = bath.dim;
    double worst_inner = 0.0;

    // J(a) = int_0^1 sqrt(1 - u) / (u^2 + a^2) du, so that the tau integral
    // equals tau_min J(omega tau_min).
    auto inner = [&](double a) {
        auto g = [a](double u) { return std::sqrt(std::max(0.0, 1.0 - u)) / (u * u + a * a); };
        double total = 0.0;
        std::array<double, 4> cuts{0.0, std::min(a, 1.0), std::min(30.0 * a, 1.0), 1.0};
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (!(cuts[k + 1] > cuts[k])) continue;
            double err = 0.0;
            total += gauss_kronrod<double, 31>::integrate(g, cuts[k], cuts[k + 1], q.max_depth, q.tolerance, &err);
            worst_inner = std::max(worst_inner, err);
        }
        return total;
    };

    // x = E / 2kT up to E = 30 kT.
    auto outer = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double e = kt2 * x;
        const double rate = xi * std::pow(e, d) * coth(x);
        const double a = omega / rate;
        return sech2(x) * inner(a) / rate;
    };
    double total = 0.0, err_total = 0.0;
    const std::array<double, 6> cuts{0.0, 0.5, 2.0, 5.0, 10.0, 15.0};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double err = 0.0;
        total += gauss_kronrod<double, 31>::integrate(outer, cuts[k], cuts[k + 1], q.max_depth, q.tolerance, &err);
        err_total += err;
    }
    const double value = dipole_strength(ens) * omega / (6.0 * constants::k_b * t) * kt2 * total;
    if (!std::isfinite(value) || err_total > 1e-4 * std::abs(total)) {
        std::ostringstream os;
        os << "relaxation_loss_tangent: quadrature did not converge (estimate " << value
           << ", relative error " << err_total / std::abs(total) << ")";
        throw NumericalError(os.str());
    }
    return value;
}

double tls_moment(int d) {
    if (d < 1 || d > 3) throw ValidationError("tls_moment: d must be 1, 2 or 3");
    static std::once_flag once;
    static std::array<double, 3> cache{};
    std::call_once(once, [] {
        for (int k = 1; k <= 3; ++k) {
            auto f = [k](double u) {
                if (u <= 0.0) return k == 1 ? 1.0 : 0.0;
                return std::pow(u, k) * sech2(u) / std::tanh(u);
            };
            cache[static_cast<std::size_t>(k - 1)] =
                gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14) +
                gauss_kronrod<double, 61>::integrate(f, 1.0, 40.0, 15, 1e-14);
        }
    });
    return cache[static_cast<std::size_t>(d - 1)];
}

AsymptoticLoss relaxation_loss_asymptotic(const TlsEnsemble& ens, const PhononBath& bath, double omega,
                                          double t) {
    ens.validate();
    bath.validate();
    if (!(omega > 0.0) || !(t > 0.0)) throw ValidationError("relaxation_loss_asymptotic: omega, t must be positive");
    const double kt2 = 2.0 * constants::k_b * t;
    AsymptoticLoss out;
    // The tau integral tends to 2 / (3 omega^2 tau_min).
    out.tan_delta = 2.0 * dipole_strength(ens) / 9.0 * phonon_xi(bath) * tls_moment(bath.dim) *
                    std::pow(kt2, bath.dim) / omega;
    out.valid = omega * tls_tau_min(bath, kt2, t) > 10.0;
    return out;
}

}  // namespace fluxonium
