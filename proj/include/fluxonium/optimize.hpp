// optimize.hpp: bounded Levenberg-Marquardt least squares with a
// forward-difference Jacobian and optional jittered restarts.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace fluxonium {

struct ParameterSpec {
    std::string name;
    double initial{0.0};
    double lower{-std::numeric_limits<double>::infinity()};
    double upper{std::numeric_limits<double>::infinity()};
    bool log_scale{false};  // optimize log(p); requires p > 0
    bool fixed{false};
};

/// Residual vector for the full parameter vector (fixed entries included).
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LmOptions {
    int max_iterations{300};
    double ftol{1e-14};
    double xtol{1e-12};
    double gtol{1e-14};
    double fd_step{1e-7};
    double singular_tol{1e-6};
    int starts{1};
    double jitter{0.1};
    std::uint64_t seed{0};
    bool absolute_sigma{false};  // residuals are already divided by known sigmas
};

struct LmResult {
    Eigen::VectorXd params;
    Eigen::VectorXd sigmas;      // 0 for fixed, inf when unidentifiable
    Eigen::MatrixXd covariance;  // over all parameters, zero rows for fixed
    double cost{0.0};            // 0.5 * |r|^2
    int iterations{0};
    int dof{0};
    bool converged{false};
    bool singular{false};
    std::string message;
    std::vector<std::string> names;

    [[nodiscard]] double residual_norm() const;
    [[nodiscard]] double value(const std::string& name) const;
    [[nodiscard]] double sigma(const std::string& name) const;
};

LmResult levenberg_marquardt(const ResidualFunction& f, const std::vector<ParameterSpec>& specs,
                             const LmOptions& opts = {});

/// Forward-difference Jacobian of f at p, with steps rel_step * max(|p|, tiny).
Eigen::MatrixXd numerical_jacobian(const ResidualFunction& f, const Eigen::VectorXd& p,
                                   double rel_step = 1e-7);

/// Names of the two free parameters dominating the weakest Jacobian
/// direction, "a/b".
std::string degenerate_pair(const Eigen::MatrixXd& jacobian, const std::vector<std::string>& names);

}  // namespace fluxonium
