// spectrum.hpp: fluxonium Hamiltonian, eigenstates, matrix elements and
// dispersive coupling to a readout resonator.
//
//   H = 4 E_C n^2 - E_J cos(phi) + E_L (phi - phi_ext)^2 / 2
//
// The Hamiltonian is diagonalized in the harmonic-oscillator eigenbasis of its
// LC part. cos(phi) and sin(phi/2) are matrix functions of the truncated phi
// operator, evaluated through its eigendecomposition.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <string>

namespace fluxonium {

/// Circuit energies as frequencies (Hz, E/h) and the reduced external phase.
struct CircuitParams {
    double e_c{0.0};
    double e_j{0.0};
    double e_l{0.0};
    double phi_ext{0.0};  // 2 pi Phi_ext / Phi0

    void validate() const;

    /// Copy with the external phase set from a flux in units of Phi0.
    [[nodiscard]] CircuitParams at_flux(double flux_phi0) const;
    [[nodiscard]] double flux() const;  // Phi_ext / Phi0
};

/// Readout resonator. f_res and g are frequencies in Hz (g is g/2pi).
struct ResonatorParams {
    double f_res{0.0};
    double g{0.0};
    double q_factor{0.0};
    double z0{50.0};

    void validate() const;
};

enum class Operator { phi, n, sin_half_phi };

std::string to_string(Operator op);

struct MatrixElement {
    double magnitude{0.0};
    std::complex<double> value;  // n is purely imaginary in this basis
};

struct DiagonalizeOptions {
    int basis_dim{120};
    bool auto_grow{true};
    int grow_step{20};
    int max_basis_dim{240};
    int check_levels{10};
    double tolerance{1e-10};
};

class EigenSolution {
public:
    EigenSolution(CircuitParams params, int basis_dim, Eigen::VectorXd energies,
                  Eigen::MatrixXd vectors, Eigen::MatrixXd phi, Eigen::MatrixXd n_imag,
                  Eigen::MatrixXd sin_half_phi, double convergence_residual);

    [[nodiscard]] int levels() const { return static_cast<int>(energies_.size()); }
    [[nodiscard]] int basis_dim() const { return basis_dim_; }
    [[nodiscard]] const CircuitParams& params() const { return params_; }

    /// Eigenenergies in Hz, ascending.
    [[nodiscard]] const Eigen::VectorXd& energies() const { return energies_; }
    /// Columns are eigenvectors in the oscillator basis.
    [[nodiscard]] const Eigen::MatrixXd& vectors() const { return vectors_; }

    /// f_j - f_i in Hz.
    [[nodiscard]] double frequency(int i, int j) const;
    /// 2 pi (f_j - f_i) in rad/s.
    [[nodiscard]] double angular_frequency(int i, int j) const;

    [[nodiscard]] MatrixElement matrix_element(Operator op, int i, int j) const;
    [[nodiscard]] double magnitude(Operator op, int i, int j) const {
        return matrix_element(op, i, j).magnitude;
    }

    /// Relative change of the checked energies between basis_dim and
    /// basis_dim + grow_step (0 if the check was skipped).
    [[nodiscard]] double convergence_residual() const { return residual_; }

private:
    void check_index(int i, int j) const;

    CircuitParams params_;
    int basis_dim_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
    Eigen::MatrixXd phi_;           // <i|phi|j>
    Eigen::MatrixXd n_imag_;        // <i|n|j> = i * n_imag_(i, j)
    Eigen::MatrixXd sin_half_phi_;  // <i|sin(phi/2)|j>
    double residual_;
};

/// Lowest n_levels eigenpairs. Throws NumericalError if the basis cannot be
/// grown enough to meet opts.tolerance.
EigenSolution diagonalize(const CircuitParams& params, int n_levels,
                          const DiagonalizeOptions& opts = {});

/// Full oscillator-basis Hamiltonian (Hz) for a given truncation.
Eigen::MatrixXd hamiltonian_matrix(const CircuitParams& params, int basis_dim);

/// d f_ij / d(Phi_ext/Phi0) in Hz per Phi0, by central difference with
/// step 1e-5 Phi0. With richardson, the step-halved estimates are combined.
double flux_sensitivity(const CircuitParams& params, int i, int j, bool richardson = false);

struct DispersiveShifts {
    double chi0{0.0};  // Hz
    double chi1{0.0};  // Hz
};

/// Second-order dispersive shifts of the resonator for qubit states 0 and 1,
/// summed over all n-coupled transitions available in sol.
DispersiveShifts dispersive_shifts(const EigenSolution& sol, const ResonatorParams& res);
DispersiveShifts dispersive_shifts(const CircuitParams& params, const ResonatorParams& res,
                                   int levels = 20);

}  // namespace fluxonium
