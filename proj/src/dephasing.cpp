// dephasing.cpp

#include "fluxonium/dephasing.hpp"

#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/fitting.hpp"
#include "fluxonium/optimize.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fluxonium {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double relative_error(double sigma, double value) {
    if (sigma == 0.0) return 0.0;
    if (value == 0.0) return inf;
    return sigma / std::abs(value);
}

}  // namespace

double echo_prefactor(double alpha) {
    if (!(alpha > 0.0 && alpha < 3.0)) throw ValidationError("echo_prefactor: alpha must lie in (0, 3)");
    // Reflection of Gamma(-1-alpha) turns the product into
    // pi (2^(1-alpha) - 1) / (cos(pi alpha / 2) Gamma(2 + alpha)).
    const double eps = alpha - 1.0;
    if (std::abs(eps) < 1e-3) {
        const double l = std::log(2.0);
        const double num = 1.0 - eps * l / 2.0 + eps * eps * l * l / 6.0;
        const double x = constants::pi * eps / 2.0;
        const double den = 1.0 - x * x / 6.0;
        return 2.0 * l * num / (den * std::tgamma(3.0 + eps));
    }
    return constants::pi * std::expm1(-eps * std::log(2.0)) /
           (std::cos(constants::pi * alpha / 2.0) * std::tgamma(2.0 + alpha));
}

void EchoModel::validate() const {
    if (!(a_phi >= 0.0)) throw ValidationError("EchoModel: a_phi must be >= 0");
    if (!(alpha > 0.0 && alpha < 3.0)) throw ValidationError("EchoModel: alpha must lie in (0, 3)");
    if (!(t1 > 0.0) || !(t_phi_exp > 0.0)) throw ValidationError("EchoModel: times must be positive");
    if (!(slope >= 0.0)) throw ValidationError("EchoModel: slope must be >= 0");
}

double echo_coherence(const EchoModel& m, double t) {
    m.validate();
    if (t < 0.0) throw ValidationError("echo_coherence: t must be >= 0");
    if (t == 0.0) return 0.0;
    return std::pow(t, 1.0 + m.alpha) * m.slope * m.slope * m.a_phi * echo_prefactor(m.alpha);
}

double echo_envelope(const EchoModel& m, double t) {
    return std::exp(-t / (2.0 * m.t1) - t / m.t_phi_exp - echo_coherence(m, t));
}

double echo_gamma_tilde(const EchoModel& m) {
    m.validate();
    return m.slope * std::sqrt(m.a_phi * echo_prefactor(m.alpha));
}

EchoFit fit_echo_trace(const std::vector<double>& times, const std::vector<double>& values, double t1,
                       double alpha, std::optional<double> t_phi_exp) {
    const std::size_t n = times.size();
    if (n < 8 || values.size() != n) throw ValidationError("fit_echo_trace: need >= 8 matching points");
    if (!(t1 > 0.0)) throw ValidationError("fit_echo_trace: t1 must be positive");
    if (!(alpha > 0.0 && alpha < 3.0)) throw ValidationError("fit_echo_trace: alpha must lie in (0, 3)");
    if (t_phi_exp && !(*t_phi_exp > 0.0)) throw ValidationError("fit_echo_trace: t_phi_exp must be positive");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    const double span = times[order.back()] - times[order.front()];
    if (!(span > 0.0)) throw ValidationError("fit_echo_trace: times must span a positive range");

    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    double c0 = 0.0;
    for (std::size_t k = n - tail; k < n; ++k) c0 += values[order[k]];
    c0 /= static_cast<double>(tail);
    const double a0 = values[order.front()] - c0;
    const double t_exp0 = t_phi_exp.value_or(10.0 * span);

    double te0 = span / 3.0;
    for (std::size_t k : order) {
        if (a0 != 0.0 && (values[k] - c0) / a0 < std::exp(-1.0)) {
            const double t = times[k];
            const double chi = 1.0 - t / (2.0 * t1) - t / t_exp0;
            te0 = chi > 0.05 ? t / std::pow(chi, 1.0 / (1.0 + alpha)) : t;
            break;
        }
    }

    const bool free_exp = !t_phi_exp.has_value();
    const ResidualFunction f = [&](const Eigen::VectorXd& p) {
        const double inv_exp = free_exp ? 1.0 / p(3) : (std::isinf(*t_phi_exp) ? 0.0 : 1.0 / *t_phi_exp);
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const double t = times[k];
            const double e = std::exp(-t / (2.0 * t1) - t * inv_exp - std::pow(t / p(1), 1.0 + alpha));
            r(static_cast<Eigen::Index>(k)) = p(0) * e + p(2) - values[k];
        }
        return r;
    };
    std::vector<ParameterSpec> specs{
        {"amplitude", a0},
        {"t_phi_e", te0, 0.0, inf, true},
        {"offset", c0},
    };
    if (free_exp) specs.push_back({"t_phi_exp", t_exp0, 0.0, inf, true});
    LmOptions opts;
    opts.starts = 3;
    const LmResult lm = levenberg_marquardt(f, specs, opts);

    EchoFit out;
    out.amplitude = lm.params(0);
    out.t_phi_e = lm.params(1);
    out.offset = lm.params(2);
    out.t_phi_exp = free_exp ? lm.params(3) : *t_phi_exp;
    out.sigma_amplitude = lm.sigmas(0);
    out.sigma_t_phi_e = lm.sigmas(1);
    out.sigma_offset = lm.sigmas(2);
    out.sigma_t_phi_exp = free_exp ? lm.sigmas(3) : 0.0;
    const double q = (1.0 + alpha) / 2.0;
    out.gamma_tilde = std::pow(out.t_phi_e, -q);
    out.sigma_gamma_tilde = q * out.gamma_tilde * out.sigma_t_phi_e / out.t_phi_e;
    out.residual_norm = lm.residual_norm();
    out.rejected = lm.singular || relative_error(out.sigma_amplitude, out.amplitude) > rejection_threshold ||
                   relative_error(out.sigma_t_phi_e, out.t_phi_e) > rejection_threshold ||
                   relative_error(out.sigma_offset, out.offset) > rejection_threshold ||
                   (free_exp && relative_error(out.sigma_t_phi_exp, out.t_phi_exp) > rejection_threshold);
    return out;
}

namespace {

struct LineFit {
    double slope{0.0}, intercept{0.0}, sigma_slope{0.0}, r_squared{0.0};
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw ValidationError("extract_flux_noise_from_echo: slopes are degenerate");
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = y[k] - out.intercept - out.slope * x[k];
        ss_res += d * d;
    }
    out.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    out.sigma_slope = x.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
    return out;
}

std::vector<double> refit_gamma_tilde(const EchoDataset& ds, double alpha, double t_exp) {
    std::vector<double> g;
    g.reserve(ds.records.size());
    for (const auto& r : ds.records) g.push_back(fit_echo_trace(r.times, r.values, r.t1, alpha, t_exp).gamma_tilde);
    return g;
}

}  // namespace

EchoExtraction extract_flux_noise_from_echo(const EchoDataset& ds, double alpha,
                                            const EchoExtractionOptions& opts) {
    if (ds.records.size() < 4) throw ValidationError("extract_flux_noise_from_echo: need >= 4 slope points");
    const double z = echo_prefactor(alpha);
    std::vector<double> slopes;
    for (const auto& r : ds.records) {
        if (!(r.slope >= 0.0)) throw ValidationError("extract_flux_noise_from_echo: slopes must be >= 0");
        slopes.push_back(r.slope);
    }
    const bool traces = std::all_of(ds.records.begin(), ds.records.end(), [](const auto& r) { return r.has_trace(); });
    if (!traces && !opts.t_phi_exp)
        throw ValidationError("extract_flux_noise_from_echo: scanning T_exp needs raw traces");

    EchoExtraction out;
    if (!traces) {
        for (const auto& r : ds.records) out.gamma_tilde.push_back(r.gamma_tilde);
    } else if (opts.t_phi_exp) {
        out.gamma_tilde = refit_gamma_tilde(ds, alpha, *opts.t_phi_exp);
        out.t_phi_exp = opts.t_phi_exp;
    } else {
        if (!(opts.scan_min > 0.0 && opts.scan_max > opts.scan_min))
            throw ValidationError("extract_flux_noise_from_echo: invalid scan range");
        auto neg_r2 = [&](double log_t) {
            try {
                return -fit_line(slopes, refit_gamma_tilde(ds, alpha, std::exp(log_t))).r_squared;
            } catch (const NumericalError&) {
                return inf;
            }
        };
        const double lo = std::log(opts.scan_min), hi = std::log(opts.scan_max);
        constexpr int grid = 41;
        int best = 0;
        double best_v = inf;
        for (int k = 0; k < grid; ++k) {
            const double v = neg_r2(lo + (hi - lo) * k / (grid - 1));
            if (v < best_v) {
                best_v = v;
                best = k;
            }
        }
        const double step = (hi - lo) / (grid - 1);
        const double a = std::max(lo, lo + step * (best - 1));
        const double b = std::min(hi, lo + step * (best + 1));
        const auto [log_t, v] = boost::math::tools::brent_find_minima(neg_r2, a, b, 30);
        const double chosen = v <= best_v ? std::exp(log_t) : std::exp(lo + step * best);
        out.t_phi_exp = chosen;
        out.gamma_tilde = refit_gamma_tilde(ds, alpha, chosen);
    }

    const LineFit line = fit_line(slopes, out.gamma_tilde);
    out.line_slope = line.slope;
    out.intercept = line.intercept;
    out.r_squared = line.r_squared;
    out.a_phi = line.slope * line.slope / z;
    out.sigma_a_phi = 2.0 * std::abs(line.slope) * line.sigma_slope / z;
    return out;
}

double spinlock_flux_psd(double gamma_1rho, double gamma_1, double slope) {
    if (!(gamma_1 >= 0.0) || !(slope > 0.0))
        throw ValidationError("spinlock_flux_psd: need gamma_1 >= 0 and slope > 0");
    const double gamma_nu = gamma_1rho - gamma_1 / 2.0;
    if (gamma_nu < 0.0) {
        std::ostringstream os;
        os << "spinlock_flux_psd: Gamma_1rho < Gamma_1 / 2 gives negative Gamma_nu (" << gamma_nu << " 1/s)";
        throw ValidationError(os.str());
    }
    return 2.0 * gamma_nu / (slope * slope);
}

}  // namespace fluxonium
