// optimize.cpp

#include "fluxonium/optimize.hpp"

#include "fluxonium/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fluxonium {

namespace {

// Free parameters are optimized in a scaled coordinate u: log(p) for log
// parameters, p / s otherwise, with s the magnitude of the starting value.
struct Transform {
    std::vector<int> free;
    std::vector<double> scale;
    std::vector<bool> log;
    std::vector<double> lower, upper;  // in u

    Eigen::VectorXd base;

    Eigen::VectorXd to_params(const Eigen::VectorXd& u) const {
        Eigen::VectorXd p = base;
        for (std::size_t k = 0; k < free.size(); ++k)
            p(free[k]) = log[k] ? std::exp(u(static_cast<Eigen::Index>(k)))
                                : u(static_cast<Eigen::Index>(k)) * scale[k];
        return p;
    }

    double dp_du(const Eigen::VectorXd& p, std::size_t k) const {
        return log[k] ? p(free[k]) : scale[k];
    }

    void clamp(Eigen::VectorXd& u) const {
        for (std::size_t k = 0; k < free.size(); ++k) {
            auto i = static_cast<Eigen::Index>(k);
            u(i) = std::clamp(u(i), lower[k], upper[k]);
        }
    }
};

Transform make_transform(const std::vector<ParameterSpec>& specs, Eigen::VectorXd& u0) {
    Transform t;
    t.base.resize(static_cast<Eigen::Index>(specs.size()));
    std::vector<double> start;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        if (!(s.lower <= s.upper)) throw ValidationError("parameter " + s.name + ": lower > upper");
        const double p0 = std::clamp(s.initial, s.lower, s.upper);
        t.base(static_cast<Eigen::Index>(i)) = p0;
        if (s.fixed) continue;
        t.free.push_back(static_cast<int>(i));
        t.log.push_back(s.log_scale);
        if (s.log_scale) {
            if (!(p0 > 0.0)) throw ValidationError("parameter " + s.name + ": log scale needs p > 0");
            t.scale.push_back(1.0);
            t.lower.push_back(s.lower > 0.0 ? std::log(s.lower) : -std::numeric_limits<double>::infinity());
            t.upper.push_back(std::log(s.upper));
            start.push_back(std::log(p0));
        } else {
            const double sc = p0 != 0.0 ? std::abs(p0) : 1.0;
            t.scale.push_back(sc);
            t.lower.push_back(s.lower / sc);
            t.upper.push_back(s.upper / sc);
            start.push_back(p0 / sc);
        }
    }
    u0 = Eigen::Map<Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(start.size()));
    return t;
}

bool finite(const Eigen::VectorXd& r) { return r.allFinite(); }

struct Evaluator {
    const ResidualFunction& f;
    const Transform& t;

    bool residual(const Eigen::VectorXd& u, Eigen::VectorXd& r) const {
        try {
            r = f(t.to_params(u));
        } catch (const NumericalError&) {
            return false;
        }
        return finite(r);
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u, const Eigen::VectorXd& r, double step) const {
        Eigen::MatrixXd j(r.size(), u.size());
        for (Eigen::Index k = 0; k < u.size(); ++k) {
            const double h = step * std::max(std::abs(u(k)), 1.0);
            Eigen::VectorXd up = u;
            double signed_h = h;
            if (u(k) + h > t.upper[static_cast<std::size_t>(k)]) signed_h = -h;
            up(k) += signed_h;
            Eigen::VectorXd rp;
            if (!residual(up, rp)) {
                up(k) = u(k) - signed_h;
                signed_h = -signed_h;
                if (!residual(up, rp)) throw NumericalError("Jacobian evaluation failed");
            }
            j.col(k) = (rp - r) / signed_h;
        }
        return j;
    }
};

struct RunResult {
    Eigen::VectorXd u;
    Eigen::VectorXd r;
    double cost;
    int iterations;
    bool converged;
    std::string message;
};

RunResult run_lm(const Evaluator& ev, Eigen::VectorXd u, const LmOptions& opts) {
    Eigen::VectorXd r;
    if (!ev.residual(u, r)) throw NumericalError("least squares: residuals not finite at start");
    double cost = 0.5 * r.squaredNorm();
    double lambda = 1e-3;
    RunResult out{u, r, cost, 0, false, "maximum iterations reached"};
    if (u.size() == 0) {
        out.converged = true;
        out.message = "no free parameters";
        return out;
    }
    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it + 1;
        const Eigen::MatrixXd j = ev.jacobian(u, r, opts.fd_step);
        const Eigen::MatrixXd a = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;
        if (g.cwiseAbs().maxCoeff() <= opts.gtol * std::max(cost, 1e-300) || cost == 0.0) {
            out.converged = true;
            out.message = "gradient tolerance";
            break;
        }
        Eigen::VectorXd diag = a.diagonal();
        const double dmax = std::max(diag.maxCoeff(), 1e-300);
        for (Eigen::Index k = 0; k < diag.size(); ++k) diag(k) = std::max(diag(k), 1e-12 * dmax);

        bool accepted = false;
        while (lambda < 1e16) {
            Eigen::MatrixXd m = a;
            m.diagonal() += lambda * diag;
            const Eigen::VectorXd step = m.ldlt().solve(-g);
            Eigen::VectorXd trial = u + step;
            ev.t.clamp(trial);
            Eigen::VectorXd rt;
            if (step.allFinite() && ev.residual(trial, rt)) {
                const double ct = 0.5 * rt.squaredNorm();
                if (ct < cost) {
                    const double drop = (cost - ct) / std::max(cost, 1e-300);
                    const double move = (trial - u).norm();
                    u = trial;
                    r = rt;
                    cost = ct;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    if (drop < opts.ftol || move < opts.xtol * (u.norm() + opts.xtol)) {
                        out.converged = true;
                        out.message = drop < opts.ftol ? "cost tolerance" : "step tolerance";
                    }
                    break;
                }
            }
            lambda *= 4.0;
        }
        if (!accepted) {
            out.converged = true;
            out.message = "no further decrease";
            break;
        }
        if (out.converged) break;
    }
    out.u = u;
    out.r = r;
    out.cost = cost;
    return out;
}

}  // namespace

double LmResult::residual_norm() const { return std::sqrt(2.0 * cost); }

double LmResult::value(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return params(static_cast<Eigen::Index>(k));
    throw ValidationError("unknown parameter " + name);
}

double LmResult::sigma(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return sigmas(static_cast<Eigen::Index>(k));
    throw ValidationError("unknown parameter " + name);
}

Eigen::MatrixXd numerical_jacobian(const ResidualFunction& f, const Eigen::VectorXd& p,
                                   double rel_step) {
    const Eigen::VectorXd r0 = f(p);
    Eigen::MatrixXd j(r0.size(), p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double h = rel_step * std::max(std::abs(p(k)), 1e-300);
        Eigen::VectorXd q = p;
        q(k) += h;
        j.col(k) = (f(q) - r0) / h;
    }
    return j;
}

std::string degenerate_pair(const Eigen::MatrixXd& jacobian, const std::vector<std::string>& names) {
    if (jacobian.cols() == 0) return "";
    Eigen::MatrixXd jn = jacobian;
    for (Eigen::Index k = 0; k < jn.cols(); ++k) {
        const double n = jn.col(k).norm();
        if (n > 0.0) jn.col(k) /= n;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jn, Eigen::ComputeThinV);
    const Eigen::VectorXd v = svd.matrixV().col(svd.matrixV().cols() - 1).cwiseAbs();
    Eigen::Index first = 0;
    v.maxCoeff(&first);
    Eigen::VectorXd rest = v;
    rest(first) = -1.0;
    Eigen::Index second = first;
    if (v.size() > 1) rest.maxCoeff(&second);
    if (second == first) return names[static_cast<std::size_t>(first)];
    return names[static_cast<std::size_t>(first)] + "/" + names[static_cast<std::size_t>(second)];
}

LmResult levenberg_marquardt(const ResidualFunction& f, const std::vector<ParameterSpec>& specs,
                             const LmOptions& opts) {
    if (specs.empty()) throw ValidationError("least squares: no parameters");
    Eigen::VectorXd u0;
    const Transform t = make_transform(specs, u0);
    const Evaluator ev{f, t};

    RunResult best = run_lm(ev, u0, opts);
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int s = 1; s < opts.starts; ++s) {
        Eigen::VectorXd u = u0;
        for (Eigen::Index k = 0; k < u.size(); ++k) u(k) += opts.jitter * normal(rng);
        t.clamp(u);
        try {
            RunResult run = run_lm(ev, u, opts);
            if (run.cost < best.cost) best = std::move(run);
        } catch (const NumericalError&) {
        }
    }

    LmResult out;
    for (const auto& s : specs) out.names.push_back(s.name);
    out.params = t.to_params(best.u);
    out.cost = best.cost;
    out.iterations = best.iterations;
    out.converged = best.converged;
    out.message = best.message;
    const auto m = static_cast<int>(best.r.size());
    const auto nfree = static_cast<int>(t.free.size());
    out.dof = m - nfree;

    const Eigen::Index np = static_cast<Eigen::Index>(specs.size());
    out.sigmas = Eigen::VectorXd::Zero(np);
    out.covariance = Eigen::MatrixXd::Zero(np, np);
    if (nfree == 0) return out;

    const Eigen::MatrixXd j = ev.jacobian(best.u, best.r, opts.fd_step);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv(0);
    Eigen::MatrixXd jn = j;
    for (Eigen::Index k = 0; k < jn.cols(); ++k)
        if (jn.col(k).norm() > 0.0) jn.col(k) /= jn.col(k).norm();
    const Eigen::VectorXd svn = Eigen::JacobiSVD<Eigen::MatrixXd>(jn).singularValues();
    // Column-scaled conditioning.
    if (!(smax > 0.0) || svn(svn.size() - 1) < opts.singular_tol * svn(0) || m < nfree) {
        out.singular = true;
        std::vector<std::string> free_names;
        for (int i : t.free) free_names.push_back(specs[static_cast<std::size_t>(i)].name);
        out.message = "singular Jacobian, degenerate parameters " + degenerate_pair(j, free_names);
        out.sigmas.setConstant(std::numeric_limits<double>::infinity());
        for (Eigen::Index i = 0; i < np; ++i)
            if (specs[static_cast<std::size_t>(i)].fixed) out.sigmas(i) = 0.0;
        return out;
    }
    Eigen::VectorXd inv_s2 = sv.cwiseInverse().cwiseAbs2();
    Eigen::MatrixXd cov_u = svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose();
    if (!opts.absolute_sigma) {
        const double s2 = out.dof > 0 ? 2.0 * best.cost / out.dof : 0.0;
        cov_u *= s2;
    }
    for (int a = 0; a < nfree; ++a) {
        for (int b = 0; b < nfree; ++b) {
            const double ja = t.dp_du(out.params, static_cast<std::size_t>(a));
            const double jb = t.dp_du(out.params, static_cast<std::size_t>(b));
            out.covariance(t.free[static_cast<std::size_t>(a)], t.free[static_cast<std::size_t>(b)]) =
                ja * jb * cov_u(a, b);
        }
    }
    for (int a = 0; a < nfree; ++a) {
        const auto i = t.free[static_cast<std::size_t>(a)];
        out.sigmas(i) = std::sqrt(std::max(out.covariance(i, i), 0.0));
    }
    return out;
}

}  // namespace fluxonium
