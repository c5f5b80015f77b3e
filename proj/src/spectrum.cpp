// spectrum.cpp: oscillator-basis diagonalization of the fluxonium circuit.

#include "fluxonium/spectrum.hpp"

#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace fluxonium {

namespace {

// Truncated ladder combinations and the eigendecomposition of x = a + a^dag.
// These depend only on the truncation, so they are shared between calls.
struct LadderBasis {
    Eigen::MatrixXd x;       // a + a^dag
    Eigen::MatrixXd p;       // a^dag - a (real antisymmetric)
    Eigen::VectorXd x_eig;   // eigenvalues of x
    Eigen::MatrixXd x_vecs;  // eigenvectors of x
};

std::shared_ptr<const LadderBasis> ladder_basis(int dim) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const LadderBasis>> cache;
    {
        std::lock_guard lock(mutex);
        auto it = cache.find(dim);
        if (it != cache.end()) return it->second;
    }
    auto basis = std::make_shared<LadderBasis>();
    basis->x = Eigen::MatrixXd::Zero(dim, dim);
    basis->p = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) {
        const double s = std::sqrt(static_cast<double>(k + 1));
        basis->x(k, k + 1) = s;
        basis->x(k + 1, k) = s;
        basis->p(k + 1, k) = s;
        basis->p(k, k + 1) = -s;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(basis->x);
    basis->x_eig = es.eigenvalues();
    basis->x_vecs = es.eigenvectors();
    std::lock_guard lock(mutex);
    return cache.emplace(dim, std::move(basis)).first->second;
}

double phi_zpf(const CircuitParams& p) { return std::pow(2.0 * p.e_c / p.e_l, 0.25); }

template <class F>
Eigen::MatrixXd matrix_function(const LadderBasis& b, double scale, F f) {
    Eigen::VectorXd d(b.x_eig.size());
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = f(scale * b.x_eig(k));
    return b.x_vecs * d.asDiagonal() * b.x_vecs.transpose();
}

struct RawSolution {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

RawSolution solve(const CircuitParams& params, int dim, int n_levels) {
    const Eigen::MatrixXd h = hamiltonian_matrix(params, dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver failed");
    return {es.eigenvalues().head(n_levels), es.eigenvectors().leftCols(n_levels)};
}

double max_relative_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double scale = std::max(std::abs(a(k)), floor);
        worst = std::max(worst, std::abs(a(k) - b(k)) / scale);
    }
    return worst;
}

}  // namespace

void CircuitParams::validate() const {
    if (!(e_c > 0.0) || !(e_j > 0.0) || !(e_l > 0.0))
        throw ValidationError("CircuitParams: e_c, e_j and e_l must be positive");
    if (!std::isfinite(phi_ext)) throw ValidationError("CircuitParams: phi_ext must be finite");
    if (!std::isfinite(e_c) || !std::isfinite(e_j) || !std::isfinite(e_l))
        throw ValidationError("CircuitParams: energies must be finite");
}

CircuitParams CircuitParams::at_flux(double flux_phi0) const {
    CircuitParams out = *this;
    out.phi_ext = constants::two_pi * flux_phi0;
    return out;
}

double CircuitParams::flux() const { return phi_ext / constants::two_pi; }

void ResonatorParams::validate() const {
    if (!(f_res > 0.0) || !(g >= 0.0) || !(q_factor > 0.0) || !(z0 > 0.0))
        throw ValidationError("ResonatorParams: f_res, q_factor, z0 must be positive and g >= 0");
}

std::string to_string(Operator op) {
    switch (op) {
        case Operator::phi: return "phi";
        case Operator::n: return "n";
        case Operator::sin_half_phi: return "sin_half_phi";
    }
    return "unknown";
}

EigenSolution::EigenSolution(CircuitParams params, int basis_dim, Eigen::VectorXd energies,
                             Eigen::MatrixXd vectors, Eigen::MatrixXd phi,
                             Eigen::MatrixXd n_imag, Eigen::MatrixXd sin_half_phi,
                             double convergence_residual)
    : params_(params),
      basis_dim_(basis_dim),
      energies_(std::move(energies)),
      vectors_(std::move(vectors)),
      phi_(std::move(phi)),
      n_imag_(std::move(n_imag)),
      sin_half_phi_(std::move(sin_half_phi)),
      residual_(convergence_residual) {}

void EigenSolution::check_index(int i, int j) const {
    if (i < 0 || j < 0 || i >= levels() || j >= levels()) {
        std::ostringstream os;
        os << "level index (" << i << ", " << j << ") outside solution with " << levels()
           << " levels";
        throw ValidationError(os.str());
    }
}

double EigenSolution::frequency(int i, int j) const {
    check_index(i, j);
    return energies_(j) - energies_(i);
}

double EigenSolution::angular_frequency(int i, int j) const {
    return constants::two_pi * frequency(i, j);
}

MatrixElement EigenSolution::matrix_element(Operator op, int i, int j) const {
    check_index(i, j);
    switch (op) {
        case Operator::phi: {
            const double v = phi_(i, j);
            return {std::abs(v), {v, 0.0}};
        }
        case Operator::n: {
            const double v = n_imag_(i, j);
            return {std::abs(v), {0.0, v}};
        }
        case Operator::sin_half_phi: {
            const double v = sin_half_phi_(i, j);
            return {std::abs(v), {v, 0.0}};
        }
    }
    throw ValidationError("unknown operator");
}

Eigen::MatrixXd hamiltonian_matrix(const CircuitParams& params, int basis_dim) {
    params.validate();
    if (basis_dim < 2) throw ValidationError("hamiltonian_matrix: basis_dim must be >= 2");
    const auto basis = ladder_basis(basis_dim);
    const double zpf = phi_zpf(params);
    const double omega_p = std::sqrt(8.0 * params.e_c * params.e_l);

    Eigen::MatrixXd h = -params.e_j *
        matrix_function(*basis, zpf, [](double phi) { return std::cos(phi); });
    h -= (params.e_l * params.phi_ext * zpf) * basis->x;
    const double shift = 0.5 * params.e_l * params.phi_ext * params.phi_ext;
    for (int k = 0; k < basis_dim; ++k) h(k, k) += omega_p * (k + 0.5) + shift;
    return h;
}

EigenSolution diagonalize(const CircuitParams& params, int n_levels,
                          const DiagonalizeOptions& opts) {
    params.validate();
    if (n_levels < 2) throw ValidationError("diagonalize: n_levels must be >= 2");
    if (opts.grow_step <= 0) throw ValidationError("diagonalize: grow_step must be positive");

    int dim = std::max(opts.basis_dim, n_levels + 40);
    const int max_dim = std::max(opts.max_basis_dim, dim);
    const int checked = std::max(opts.check_levels, n_levels);
    const double floor = params.e_c + params.e_l;

    RawSolution current = solve(params, dim, std::min(checked, dim));
    double residual = 0.0;
    if (opts.auto_grow) {
        for (;;) {
            const int next_dim = dim + opts.grow_step;
            RawSolution next = solve(params, next_dim, std::min(checked, dim));
            residual = max_relative_change(current.energies, next.energies, floor);
            if (residual < opts.tolerance) break;
            if (next_dim > max_dim) {
                std::ostringstream os;
                os << "diagonalize: basis not converged at dim " << dim
                   << " (relative energy change " << residual << ", tolerance "
                   << opts.tolerance << ")";
                throw NumericalError(os.str());
            }
            dim = next_dim;
            current = std::move(next);
        }
    }

    const auto basis = ladder_basis(dim);
    const double zpf = phi_zpf(params);
    const Eigen::MatrixXd v = current.vectors.leftCols(n_levels);

    Eigen::MatrixXd phi = zpf * (v.transpose() * basis->x * v);
    Eigen::MatrixXd n_imag = (1.0 / (2.0 * zpf)) * (v.transpose() * basis->p * v);
    const Eigen::MatrixXd sin_half =
        matrix_function(*basis, zpf, [](double x) { return std::sin(0.5 * x); });
    Eigen::MatrixXd sin_half_phi = v.transpose() * sin_half * v;

    return EigenSolution(params, dim, current.energies.head(n_levels), v, std::move(phi),
                         std::move(n_imag), std::move(sin_half_phi), residual);
}

double flux_sensitivity(const CircuitParams& params, int i, int j, bool richardson) {
    params.validate();
    const int levels = std::max(i, j) + 1;
    if (i < 0 || j < 0) throw ValidationError("flux_sensitivity: negative level index");
    const EigenSolution centre = diagonalize(params, std::max(levels, 2));
    const int dim = centre.basis_dim();
    const double flux = params.flux();

    auto transition = [&](double f) {
        const RawSolution s = solve(params.at_flux(f), dim, std::max(levels, 2));
        return s.energies(j) - s.energies(i);
    };
    auto derivative = [&](double step) {
        return (transition(flux + step) - transition(flux - step)) / (2.0 * step);
    };

    constexpr double step = 1e-5;
    const double d1 = derivative(step);
    if (!richardson) return d1;
    const double d2 = derivative(0.5 * step);
    return (4.0 * d2 - d1) / 3.0;
}

DispersiveShifts dispersive_shifts(const EigenSolution& sol, const ResonatorParams& res) {
    res.validate();
    constexpr double min_detuning = 1e6;
    DispersiveShifts out;
    if (res.g == 0.0) return out;
    const double g2 = res.g * res.g;
    for (int i = 0; i < 2; ++i) {
        double chi = 0.0;
        for (int j = 0; j < sol.levels(); ++j) {
            if (j == i) continue;
            const double fij = sol.frequency(i, j);
            if (std::abs(std::abs(fij) - res.f_res) < min_detuning) {
                std::ostringstream os;
                os << "dispersive_shifts: transition " << i << "->" << j << " at " << fij
                   << " Hz is within 1 MHz of the resonator";
                throw ValidationError(os.str());
            }
            const double n2 = std::pow(sol.magnitude(Operator::n, i, j), 2);
            chi += g2 * n2 * 2.0 * fij / (res.f_res * res.f_res - fij * fij);
        }
        (i == 0 ? out.chi0 : out.chi1) = chi;
    }
    return out;
}

DispersiveShifts dispersive_shifts(const CircuitParams& params, const ResonatorParams& res,
                                   int levels) {
    return dispersive_shifts(diagonalize(params, levels), res);
}

}  // namespace fluxonium
