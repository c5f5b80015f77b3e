// kinetics.cpp

#include "fluxonium/kinetics.hpp"

#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <sstream>

namespace fluxonium {

namespace {

constexpr double symmetry_tolerance = 1e-8;

bool same_temperature(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

std::optional<double> common_temperature(const std::vector<NoiseChannel>& channels, double omega) {
    std::optional<double> t;
    for (const auto& ch : channels) {
        if (std::holds_alternative<ChargeLine>(ch) || std::holds_alternative<FluxLine>(ch))
            return std::nullopt;
        const double tc = channel_temperature(ch, omega);
        if (!t) t = tc;
        else if (!same_temperature(*t, tc)) return std::nullopt;
    }
    return t;
}

void fill_diagonal(Eigen::MatrixXd& b) {
    for (Eigen::Index i = 0; i < b.cols(); ++i) {
        b(i, i) = 0.0;
        b(i, i) = -b.col(i).sum();
    }
}

Eigen::VectorXd null_vector(const Eigen::MatrixXd& b) {
    const Eigen::Index n = b.rows();
    Eigen::MatrixXd a = b;
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    return a.fullPivLu().solve(rhs);
}

struct Mode {
    double gamma;
    Eigen::VectorXd v;
    double c;
};

std::vector<Mode> symmetric_modes(const Eigen::MatrixXd& b, const Eigen::VectorXd& pi,
                                  const Eigen::VectorXd& p0) {
    const Eigen::Index n = b.rows();
    const Eigen::VectorXd d = pi.cwiseSqrt();
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) s(j, k) = b(j, k) * d(k) / d(j);
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError("decompose_modes: eigensolver failed");

    std::vector<Mode> modes;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::VectorXd u = es.eigenvectors().col(k);
        Eigen::VectorXd v = d.cwiseProduct(u);
        const double norm = v.norm();
        v /= norm;
        const double c = u.dot(p0.cwiseQuotient(d)) * norm;
        modes.push_back({-es.eigenvalues()(k), v, c});
    }
    return modes;
}

std::vector<Mode> general_modes(const Eigen::MatrixXd& b, const Eigen::VectorXd& p0) {
    const Eigen::Index n = b.rows();
    Eigen::EigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success) throw NumericalError("decompose_modes: eigensolver failed");
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw NumericalError("decompose_modes: rate matrix has complex eigenvalues");
    Eigen::MatrixXd v = es.eigenvectors().real();
    for (Eigen::Index k = 0; k < n; ++k) v.col(k).normalize();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
    const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (!std::isfinite(cond) || cond > 1e12) {
        std::ostringstream os;
        os << "decompose_modes: eigenvector matrix is near-defective (condition number " << cond
           << ")";
        throw NumericalError(os.str());
    }
    const Eigen::VectorXd c = v.fullPivLu().solve(p0);
    std::vector<Mode> modes;
    for (Eigen::Index k = 0; k < n; ++k)
        modes.push_back({-es.eigenvalues()(k).real(), v.col(k), c(k)});
    return modes;
}

double fitted_t1(const std::vector<double>& times, const Eigen::VectorXd& y) {
    const std::vector<double> values(y.data(), y.data() + y.size());
    return fit_exponential(times, values).t1;
}

}  // namespace

Eigen::VectorXd gibbs_populations(const Eigen::VectorXd& energies, double t) {
    if (!(t > 0.0)) throw ValidationError("gibbs_populations: temperature must be positive");
    const double e0 = energies.minCoeff();
    Eigen::VectorXd p(energies.size());
    for (Eigen::Index i = 0; i < energies.size(); ++i)
        p(i) = std::exp(-constants::h * (energies(i) - e0) / (constants::k_b * t));
    return p / p.sum();
}

RateMatrix rate_matrix_from_rates(const Eigen::MatrixXd& rates, std::optional<double> temperature,
                                  Eigen::VectorXd energies) {
    if (rates.rows() != rates.cols() || rates.rows() < 2)
        throw ValidationError("rate_matrix_from_rates: need a square table with n >= 2");
    RateMatrix out;
    out.n = static_cast<int>(rates.rows());
    out.b = rates;
    for (Eigen::Index j = 0; j < rates.rows(); ++j)
        for (Eigen::Index i = 0; i < rates.cols(); ++i)
            if (i != j && !(rates(j, i) >= 0.0))
                throw ValidationError("rate_matrix_from_rates: rates must be nonnegative");
    fill_diagonal(out.b);
    out.temperature = temperature;
    out.energies = std::move(energies);
    return out;
}

RateMatrix build_rate_matrix(const std::vector<NoiseChannel>& channels, const EigenSolution& sol,
                             int n) {
    if (n < 2) throw ValidationError("build_rate_matrix: n must be >= 2");
    if (n > sol.levels()) throw ValidationError("build_rate_matrix: n exceeds levels in solution");
    if (channels.empty()) throw ValidationError("build_rate_matrix: empty channel list");

    RateMatrix out;
    out.n = n;
    out.b = Eigen::MatrixXd::Zero(n, n);
    for (const auto& ch : channels) {
        if (std::holds_alternative<PhenomPowerLaw>(ch) && n > 2)
            throw ValidationError("build_rate_matrix: PhenomPowerLaw is a two-level model");
        Eigen::MatrixXd part = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const auto r = transition_rates(ch, sol, i, j);
                part(j, i) = r.forward;
                part(i, j) = r.backward;
            }
        }
        out.b += part;
        fill_diagonal(part);
        out.breakdown.emplace_back(channel_name(ch), std::move(part));
    }
    fill_diagonal(out.b);
    out.energies = sol.energies().head(n);
    out.temperature = common_temperature(channels, std::abs(sol.angular_frequency(0, 1)));
    return out;
}

Eigen::VectorXd basis_population(int n, int level) {
    if (level < 0 || level >= n) throw ValidationError("basis_population: level out of range");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    p(level) = 1.0;
    return p;
}

KineticModes decompose_modes(const RateMatrix& rm, const Eigen::VectorXd& p0) {
    const Eigen::MatrixXd& b = rm.b;
    const Eigen::Index n = b.rows();
    if (p0.size() != n) throw ValidationError("decompose_modes: p0 size mismatch");
    if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-10)
        throw ValidationError("decompose_modes: p0 must be a probability vector");

    Eigen::VectorXd pi;
    if (rm.temperature && rm.energies.size() == n) pi = gibbs_populations(rm.energies, *rm.temperature);
    else pi = null_vector(b);

    bool symmetric = pi.minCoeff() > 1e-300;
    if (symmetric) {
        const Eigen::VectorXd d = pi.cwiseSqrt();
        double worst = 0.0;
        double scale = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < n; ++k) {
                const double sjk = b(j, k) * d(k) / d(j);
                const double skj = b(k, j) * d(j) / d(k);
                worst = std::max(worst, std::abs(sjk - skj));
                scale = std::max(scale, std::abs(sjk));
            }
        }
        symmetric = worst <= symmetry_tolerance * scale;
    }

    std::vector<Mode> modes = symmetric ? symmetric_modes(b, pi, p0) : general_modes(b, p0);
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& c) { return a.gamma < c.gamma; });

    const double scale = b.cwiseAbs().maxCoeff();
    // Eigenvalue accuracy bound of a backward-stable solver.
    const double zero_tol = 64.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
    if (std::abs(modes[0].gamma) > zero_tol)
        throw NumericalError("decompose_modes: no stationary mode found");
    if (modes[1].gamma <= zero_tol) {
        std::ostringstream os;
        os << "decompose_modes: more than one stationary mode (second rate " << modes[1].gamma
           << " 1/s against matrix scale " << scale << ")";
        throw NumericalError(os.str());
    }
    modes[0].gamma = 0.0;

    KineticModes out;
    out.symmetrized = symmetric;
    out.gammas.resize(n);
    out.vectors.resize(n, n);
    out.overlaps.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.gammas(k) = modes[k].gamma;
        out.vectors.col(k) = modes[k].v;
        out.overlaps(k) = modes[k].c;
    }
    Eigen::VectorXd stat = out.vectors.col(0);
    out.stationary = stat / stat.sum();

    double best = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) best = std::max(best, out.overlaps(k) * out.overlaps(k));
    int dominant = -1;
    for (Eigen::Index k = 1; k < n; ++k) {
        if (out.overlaps(k) * out.overlaps(k) >= 0.99 * best) {
            dominant = static_cast<int>(k);
            break;  // gammas ascending: first qualifying mode is the longest lived
        }
    }
    out.dominant = dominant;
    out.gamma1_eff = out.gammas(dominant);
    const Eigen::VectorXd delta = p0 - out.overlaps(0) * out.vectors.col(0) -
                                  out.overlaps(dominant) * out.vectors.col(dominant);
    out.m_metric = delta.norm();
    return out;
}

PopulationTrajectory evolve_populations(const KineticModes& modes, const std::vector<double>& times) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0)) throw ValidationError("evolve_populations: times must be >= 0");
        if (k > 0 && times[k] < times[k - 1])
            throw ValidationError("evolve_populations: times must be sorted");
    }
    PopulationTrajectory traj;
    traj.times = times;
    const Eigen::Index n = modes.n();
    traj.populations = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(times.size()));
    for (std::size_t t = 0; t < times.size(); ++t) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
        for (Eigen::Index k = 0; k < n; ++k)
            p += modes.overlaps(k) * std::exp(-modes.gammas(k) * times[t]) * modes.vectors.col(k);
        traj.populations.col(static_cast<Eigen::Index>(t)) = p;
    }
    return traj;
}

PopulationTrajectory evolve_populations(const RateMatrix& b, const Eigen::VectorXd& p0,
                                        const std::vector<double>& times) {
    return evolve_populations(decompose_modes(b, p0), times);
}

std::string to_string(ReadoutPolicy p) {
    switch (p) {
        case ReadoutPolicy::assign_leakage_to_0: return "assign_leakage_to_0";
        case ReadoutPolicy::assign_leakage_to_1: return "assign_leakage_to_1";
        case ReadoutPolicy::mean_signal: return "mean_signal";
    }
    return "unknown";
}

double SignalWeights::weight(int level) const {
    if (s.empty()) throw ValidationError("SignalWeights: empty weight list");
    return level < static_cast<int>(s.size()) ? s[static_cast<std::size_t>(level)] : s.back();
}

Eigen::VectorXd measured_excited(const PopulationTrajectory& traj, ReadoutPolicy policy,
                                 const SignalWeights& w) {
    const Eigen::Index n = traj.populations.rows();
    const Eigen::Index m = traj.populations.cols();
    if (n < 2) throw ValidationError("measured_excited: need at least two levels");
    Eigen::VectorXd y(m);
    for (Eigen::Index t = 0; t < m; ++t) {
        const auto col = traj.populations.col(t);
        switch (policy) {
            case ReadoutPolicy::assign_leakage_to_0: y(t) = col(1); break;
            case ReadoutPolicy::assign_leakage_to_1: y(t) = col.tail(n - 1).sum(); break;
            case ReadoutPolicy::mean_signal: {
                double s = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) s += w.weight(static_cast<int>(i)) * col(i);
                y(t) = s;
                break;
            }
        }
    }
    return y;
}

ReadoutEstimates simulate_readout_estimators(const PopulationTrajectory& traj, double gamma1_eff,
                                             const SignalWeights& w) {
    if (traj.populations.cols() < 5) throw ValidationError("simulate_readout_estimators: need >= 5 times");
    if (traj.times.front() == 0.0 && std::abs(traj.populations(1, 0) - 1.0) > 1e-9)
        throw ValidationError("simulate_readout_estimators: trajectory must start from p1 = 1");
    if (!(gamma1_eff > 0.0)) throw ValidationError("simulate_readout_estimators: gamma1_eff must be positive");

    ReadoutEstimates r;
    r.t1_true = fitted_t1(traj.times, traj.populations.row(1).transpose());
    r.t1_leak_to_0 = fitted_t1(traj.times, measured_excited(traj, ReadoutPolicy::assign_leakage_to_0, w));
    r.t1_leak_to_1 = fitted_t1(traj.times, measured_excited(traj, ReadoutPolicy::assign_leakage_to_1, w));
    r.t1_mean_signal = fitted_t1(traj.times, measured_excited(traj, ReadoutPolicy::mean_signal, w));
    r.misassignment_error = std::abs(r.t1_leak_to_1 - r.t1_leak_to_0) / r.t1_true;
    const double t1_eff = 1.0 / gamma1_eff;
    r.eigen_error = std::abs(r.t1_true - t1_eff) / t1_eff;
    r.mean_signal_error = std::abs(r.t1_mean_signal - r.t1_true) / r.t1_true;
    return r;
}

std::vector<double> log_time_grid(double t_min, double t_max, int count) {
    if (!(t_min > 0.0) || !(t_max > t_min) || count < 2)
        throw ValidationError("log_time_grid: need 0 < t_min < t_max and count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log(t_min);
    const double step = (std::log(t_max) - a) / (count - 1);
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + step * k);
    out.back() = t_max;
    return out;
}

std::vector<double> linear_time_grid(double t_max, int count) {
    if (!(t_max > 0.0) || count < 2) throw ValidationError("linear_time_grid: need t_max > 0, count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = t_max * k / (count - 1);
    return out;
}

}  // namespace fluxonium
