// kinetics.hpp: N-level rate equations dp/dt = B p, their eigenmodes and
// readout estimators built on the resulting population traces.

#pragma once

#include "fluxonium/noise.hpp"
#include "fluxonium/spectrum.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace fluxonium {

struct RateMatrix {
    int n{0};
    Eigen::MatrixXd b;  // b(j, i) = Gamma_{i -> j}, diagonal = -column sum
    Eigen::VectorXd energies;  // Hz, the levels the matrix was built on
    std::optional<double> temperature;  // set when every channel shares one bath
    std::vector<std::pair<std::string, Eigen::MatrixXd>> breakdown;
};

RateMatrix build_rate_matrix(const std::vector<NoiseChannel>& channels, const EigenSolution& sol,
                             int n);

/// Assemble from an explicit off-diagonal rate table r(j, i) = Gamma_{i -> j}.
RateMatrix rate_matrix_from_rates(const Eigen::MatrixXd& rates,
                                  std::optional<double> temperature = std::nullopt,
                                  Eigen::VectorXd energies = {});

/// Boltzmann populations of the given energies (Hz) at temperature t.
Eigen::VectorXd gibbs_populations(const Eigen::VectorXd& energies, double t);

struct KineticModes {
    Eigen::VectorXd gammas;    // ascending, gammas(0) is the stationary mode
    Eigen::MatrixXd vectors;   // unit-norm right eigenvectors of B (columns)
    Eigen::VectorXd overlaps;  // p0 = sum_k overlaps(k) vectors.col(k)
    Eigen::VectorXd stationary;  // stationary populations, summing to 1
    int dominant{1};
    double gamma1_eff{0.0};
    double m_metric{0.0};
    bool symmetrized{true};

    [[nodiscard]] int n() const { return static_cast<int>(gammas.size()); }
};

KineticModes decompose_modes(const RateMatrix& b, const Eigen::VectorXd& p0);

/// Population vector with all weight in one level.
Eigen::VectorXd basis_population(int n, int level);

struct PopulationTrajectory {
    std::vector<double> times;       // s
    Eigen::MatrixXd populations;     // n x times.size()
};

PopulationTrajectory evolve_populations(const KineticModes& modes, const std::vector<double>& times);
PopulationTrajectory evolve_populations(const RateMatrix& b, const Eigen::VectorXd& p0,
                                        const std::vector<double>& times);

enum class ReadoutPolicy { assign_leakage_to_0, assign_leakage_to_1, mean_signal };

std::string to_string(ReadoutPolicy p);

/// Readout weights s_i of the mean-signal policy; levels beyond the list use
/// the last entry.
struct SignalWeights {
    std::vector<double> s{0.0, 1.0, 0.5};
    [[nodiscard]] double weight(int level) const;
};

/// Measured excited-state trace under a readout policy.
Eigen::VectorXd measured_excited(const PopulationTrajectory& traj, ReadoutPolicy policy,
                                 const SignalWeights& w = {});

struct ReadoutEstimates {
    double t1_true{0.0};        // fit of p1(t) with no assignment error
    double t1_leak_to_0{0.0};
    double t1_leak_to_1{0.0};
    double t1_mean_signal{0.0};
    double misassignment_error{0.0};  // |T1^(1) - T1^(0)| / T1
    double eigen_error{0.0};          // |T1 - T1_eff| / T1_eff
    double mean_signal_error{0.0};    // |T1^(mean) - T1| / T1
};

/// Fits every policy's trace to A exp(-t / T1) + C. The trajectory must
/// start from p1 = 1.
ReadoutEstimates simulate_readout_estimators(const PopulationTrajectory& traj, double gamma1_eff,
                                             const SignalWeights& w = {});

/// Log-spaced grid of count times between t_min and t_max.
std::vector<double> log_time_grid(double t_min, double t_max, int count);
std::vector<double> linear_time_grid(double t_max, int count);

}  // namespace fluxonium
