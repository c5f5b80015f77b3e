// fitting.cpp

#include "fluxonium/fitting.hpp"

#include "fluxonium/bootstrap.hpp"
#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"
#include "fluxonium/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>
#include <set>
#include <sstream>

namespace fluxonium {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double relative_error(double sigma, double value) {
    if (sigma == 0.0) return 0.0;
    if (value == 0.0) return inf;
    return sigma / std::abs(value);
}

// Least-squares line y = a + b x; returns {a, b}.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double b = sxx > 0.0 ? sxy / sxx : 0.0;
    return {my - b * mx, b};
}

FitResult to_fit_result(const LmResult& lm, const std::vector<std::size_t>& which,
                        const std::vector<std::string>& names) {
    FitResult out;
    out.names = names;
    for (std::size_t k = 0; k < which.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(which[k]);
        out.values.push_back(lm.params(i));
        out.sigmas.push_back(lm.sigmas(i));
        out.ci_low.push_back(lm.params(i) - 1.959963984540054 * lm.sigmas(i));
        out.ci_high.push_back(lm.params(i) + 1.959963984540054 * lm.sigmas(i));
    }
    out.residual_norm = lm.residual_norm();
    out.converged = lm.converged;
    out.message = lm.message;
    return out;
}

}  // namespace

void T1Dataset::validate() const {
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        if (!(r.t1 > 0.0) || !(r.sigma > 0.0) || !std::isfinite(r.phi_ext)) {
            std::ostringstream os;
            os << "T1Dataset: record " << k << " needs t1 > 0, sigma > 0 and finite flux";
            throw ValidationError(os.str());
        }
        if (r.temperature && !(*r.temperature > 0.0))
            throw ValidationError("T1Dataset: temperatures must be positive");
    }
}

std::size_t FitResult::index(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return k;
    throw ValidationError("FitResult: unknown parameter " + name);
}

// ------------------------------------------------------------- exponential

ExponentialFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values) {
    const std::size_t n = times.size();
    if (n < 5 || values.size() != n) throw ValidationError("fit_exponential: need >= 5 matching points");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    const std::size_t tail = std::max<std::size_t>(1, n / 5);
    double c0 = 0.0;
    for (std::size_t k = n - tail; k < n; ++k) c0 += values[order[k]];
    c0 /= static_cast<double>(tail);
    const double a0 = values[order[0]] - c0;
    const double span = times[order[n - 1]] - times[order[0]];
    if (!(span > 0.0)) throw ValidationError("fit_exponential: times must span a positive range");

    double t1_0 = span / 3.0;
    {
        std::vector<double> x, y;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = (values[k] - c0) * (a0 >= 0.0 ? 1.0 : -1.0);
            if (d > 0.05 * std::abs(a0) && a0 != 0.0) {
                x.push_back(times[k]);
                y.push_back(std::log(d));
            }
        }
        if (x.size() >= 2) {
            const double slope = line_fit(x, y).second;
            if (slope < 0.0) t1_0 = std::clamp(-1.0 / slope, span * 1e-3, span * 1e3);
        }
    }

    const ResidualFunction f = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k)
            r(static_cast<Eigen::Index>(k)) = p(0) * std::exp(-times[k] / p(1)) + p(2) - values[k];
        return r;
    };
    std::vector<ParameterSpec> specs{
        {"a", a0},
        {"t1", t1_0, 0.0, inf, true},
        {"c", c0},
    };
    const LmResult lm = levenberg_marquardt(f, specs);

    ExponentialFit out;
    out.a = lm.params(0);
    out.t1 = lm.params(1);
    out.c = lm.params(2);
    out.sigma_a = lm.sigmas(0);
    out.sigma_t1 = lm.sigmas(1);
    out.sigma_c = lm.sigmas(2);
    out.converged = lm.converged;
    out.residual_norm = lm.residual_norm();
    out.rejected = lm.singular || relative_error(out.sigma_a, out.a) > rejection_threshold ||
                   relative_error(out.sigma_t1, out.t1) > rejection_threshold ||
                   relative_error(out.sigma_c, out.c) > rejection_threshold;
    return out;
}

// ------------------------------------------------------- composite T1 fit

std::vector<std::string> CompositeFitSpec::parameter_names() const {
    std::vector<std::string> names;
    std::map<std::string, int> seen;
    for (const auto& fp : free) {
        if (fp.channel >= channels.size()) throw ValidationError("CompositeFitSpec: channel index out of range");
        std::string name = channel_name(channels[fp.channel]) + "." + fp.field;
        if (seen[name]++ > 0) name += "#" + std::to_string(fp.channel);
        names.push_back(name);
    }
    return names;
}

double model_gamma1(const std::vector<NoiseChannel>& channels, const EigenSolution& sol,
                    LevelMode mode, int n_levels) {
    if (mode == LevelMode::two) return gamma1_two_level(channels, sol).gamma1;
    const RateMatrix b = build_rate_matrix(channels, sol, n_levels);
    return decompose_modes(b, basis_population(n_levels, 1)).gamma1_eff;
}

namespace {

// Repeated fits (bootstrap, meta-trials) revisit the same biases.
std::shared_ptr<const EigenSolution> cached_diagonalize(const CircuitParams& p, int levels) {
    using Key = std::tuple<double, double, double, double, int>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const EigenSolution>> cache;
    const Key key{p.e_c, p.e_j, p.e_l, p.phi_ext, levels};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto sol = std::make_shared<const EigenSolution>(diagonalize(p, levels));
    std::lock_guard lock(mutex);
    if (cache.size() >= 4096) cache.clear();
    return cache.emplace(key, std::move(sol)).first->second;
}

class CompositeModel {
public:
    CompositeModel(const CompositeFitSpec& spec, const T1Dataset& data) : spec_(spec) {
        const int levels = spec.level_mode == LevelMode::two ? 2 : spec.n_levels;
        for (const auto& r : data.records)
            if (!cache_.count(r.phi_ext)) cache_.emplace(r.phi_ext, cached_diagonalize(spec.circuit.at_flux(r.phi_ext), levels));
    }

    double t1(const T1Record& r, const std::vector<NoiseChannel>& channels) const {
        const EigenSolution& sol = *cache_.at(r.phi_ext);
        if (!r.temperature) return 1.0 / model_gamma1(channels, sol, spec_.level_mode, spec_.n_levels);
        std::vector<NoiseChannel> at_t;
        at_t.reserve(channels.size());
        for (const auto& ch : channels) at_t.push_back(with_temperature(ch, *r.temperature));
        return 1.0 / model_gamma1(at_t, sol, spec_.level_mode, spec_.n_levels);
    }

    std::vector<NoiseChannel> channels_for(const std::vector<double>& free_values) const {
        std::vector<NoiseChannel> chans = spec_.channels;
        for (std::size_t k = 0; k < spec_.free.size(); ++k)
            set_channel_parameter(chans[spec_.free[k].channel], spec_.free[k].field, free_values[k]);
        return chans;
    }

private:
    const CompositeFitSpec& spec_;
    std::map<double, std::shared_ptr<const EigenSolution>> cache_;
};

FitResult composite_fit(const T1Dataset& data, const CompositeFitSpec& spec, const CompositeModel& model,
                        const std::vector<std::size_t>& idx, const LmOptions& lm_opts,
                        const std::vector<double>* start) {
    const auto names = spec.parameter_names();
    std::vector<ParameterSpec> specs;
    for (std::size_t k = 0; k < spec.free.size(); ++k) {
        const auto& fp = spec.free[k];
        const double init = start ? (*start)[k] : channel_parameter(spec.channels[fp.channel], fp.field);
        specs.push_back({names[k], init, fp.lower, fp.upper, fp.log_scale, false});
    }
    const ResidualFunction f = [&](const Eigen::VectorXd& p) {
        const std::vector<double> vals(p.data(), p.data() + p.size());
        const auto chans = model.channels_for(vals);
        Eigen::VectorXd r(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto& rec = data.records[idx[k]];
            const double weight = rec.sigma / rec.t1;
            r(static_cast<Eigen::Index>(k)) = (std::log(model.t1(rec, chans)) - std::log(rec.t1)) / weight;
        }
        return r;
    };
    LmOptions opts = lm_opts;
    opts.absolute_sigma = true;
    const LmResult lm = levenberg_marquardt(f, specs, opts);
    if (lm.singular) throw NumericalError("fit_t1_composite: " + lm.message);
    std::vector<std::size_t> which(specs.size());
    std::iota(which.begin(), which.end(), 0);
    return to_fit_result(lm, which, names);
}

}  // namespace

std::vector<double> composite_model_t1(const CompositeFitSpec& spec, const T1Dataset& data,
                                       const std::vector<double>& free_values) {
    if (free_values.size() != spec.free.size())
        throw ValidationError("composite_model_t1: wrong number of free values");
    const CompositeModel model(spec, data);
    const auto chans = model.channels_for(free_values);
    std::vector<double> out;
    for (const auto& r : data.records) out.push_back(model.t1(r, chans));
    return out;
}

FitResult fit_t1_composite(const T1Dataset& data, const CompositeFitSpec& spec) {
    data.validate();
    if (spec.free.empty()) throw ValidationError("fit_t1_composite: no free parameters");
    if (data.size() < 2 * spec.free.size())
        throw ValidationError("fit_t1_composite: need at least twice as many points as free parameters");
    if (spec.level_mode == LevelMode::n && spec.n_levels < 2)
        throw ValidationError("fit_t1_composite: n_levels must be >= 2");
    const CompositeModel model(spec, data);
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    return composite_fit(data, spec, model, idx, spec.lm, nullptr);
}

FitResult bootstrap_confidence(const T1Dataset& data, const CompositeFitSpec& spec, int n,
                               std::uint64_t seed) {
    if (n < 100) throw ValidationError("bootstrap_confidence: n must be >= 100");
    FitResult point = fit_t1_composite(data, spec);
    const CompositeModel model(spec, data);
    LmOptions resample_opts = spec.lm;
    resample_opts.starts = 1;
    const std::vector<double> start = point.values;

    const auto samples = run_bootstrap(
        data.size(), n, seed, [&](const std::vector<std::size_t>& idx) -> std::optional<Eigen::VectorXd> {
            const FitResult r = composite_fit(data, spec, model, idx, resample_opts, &start);
            if (!r.converged) return std::nullopt;
            return Eigen::Map<const Eigen::VectorXd>(r.values.data(), static_cast<Eigen::Index>(r.values.size()));
        });

    for (std::size_t k = 0; k < point.values.size(); ++k) {
        std::vector<double> col;
        col.reserve(samples.estimates.size());
        for (const auto& e : samples.estimates) col.push_back(e(static_cast<Eigen::Index>(k)));
        point.ci_low[k] = percentile(col, 0.025);
        point.ci_high[k] = percentile(col, 0.975);
    }
    point.n_bootstrap = n;
    point.seed = seed;
    return point;
}

// --------------------------------------------------------- normalized rates

NormalizedRateFit fit_normalized_rate(const std::vector<NormalizedRatePoint>& data) {
    if (data.size() < 6) throw ValidationError("fit_normalized_rate: need >= 6 frequency points");
    std::vector<double> lx, ly;
    for (const auto& d : data) {
        if (!(d.f01 > 0.0) || !(d.rate > 0.0) || !(d.sigma >= 0.0))
            throw ValidationError("fit_normalized_rate: positive f01 and rate required");
        lx.push_back(std::log(d.f01 * 1e-9));
        ly.push_back(std::log(d.rate));
    }
    const auto [la, slope] = line_fit(lx, ly);
    const double y_min = *std::min_element(ly.begin(), ly.end());

    auto run = [&](bool with_c) {
        const ResidualFunction f = [&](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
            for (std::size_t k = 0; k < data.size(); ++k) {
                const double model = p(0) * std::pow(data[k].f01 * 1e-9, -p(1)) + p(2);
                const double w = data[k].sigma > 0.0 ? data[k].sigma / data[k].rate : 1.0;
                r(static_cast<Eigen::Index>(k)) = (std::log(model) - ly[k]) / w;
            }
            return r;
        };
        std::vector<ParameterSpec> specs{
            {"a", std::exp(la), 0.0, inf, true},
            {"mu", -slope},
            {"c", with_c ? 0.1 * std::exp(y_min) : 0.0, 0.0, inf, false, !with_c},
        };
        LmOptions opts;
        opts.starts = 5;
        opts.absolute_sigma = std::all_of(data.begin(), data.end(), [](const auto& d) { return d.sigma > 0.0; });
        return levenberg_marquardt(f, specs, opts);
    };

    LmResult lm = run(true);
    NormalizedRateFit out;
    if (lm.singular || relative_error(lm.sigmas(2), lm.params(2)) > 1.0) {
        lm = run(false);
        out.c_constrained = true;
    }
    if (lm.singular) throw NumericalError("fit_normalized_rate: " + lm.message);
    out.a = lm.params(0);
    out.mu = lm.params(1);
    out.c = lm.params(2);
    out.sigma_a = lm.sigmas(0);
    out.sigma_mu = lm.sigmas(1);
    out.sigma_c = lm.sigmas(2);
    out.residual_norm = lm.residual_norm();
    return out;
}

// --------------------------------------------------------- global power law

PowerLawFit fit_power_law_global(const std::vector<PowerLawPoint>& data, const CircuitParams& circuit,
                                 const PhenomPowerLaw& guess) {
    std::set<double> temps, omegas;
    for (const auto& d : data) {
        if (!(d.omega > 0.0) || !(d.t > 0.0) || !(d.rate > 0.0))
            throw ValidationError("fit_power_law_global: positive omega, t and rate required");
        temps.insert(d.t);
        omegas.insert(d.omega);
    }
    if (temps.size() < 3 || omegas.size() < 8)
        throw ValidationError("fit_power_law_global: need >= 3 temperatures and >= 8 frequencies");
    if (guess.a < 0.0 || guess.b < 0.0) throw ValidationError("fit_power_law_global: guess a and b must be >= 0");

    // The amplitudes are fitted as the two terms' values at the geometric-mean
    // (omega, T), which decouples them from the exponents.
    double lw = 0.0, lt = 0.0;
    for (const auto& d : data) {
        lw += std::log(d.omega);
        lt += std::log(d.t);
    }
    const double w_ref = std::exp(lw / static_cast<double>(data.size()));
    const double t_ref = std::exp(lt / static_cast<double>(data.size()));
    auto flux_term = [&](double a, double alpha, double beta1) {
        PhenomPowerLaw m{.a = a, .alpha = alpha, .beta1 = beta1};
        return phenom_normalized_rate(m, circuit, w_ref, t_ref);
    };
    auto charge_term = [&](double b, double gamma, double beta2) {
        PhenomPowerLaw m{.b = b, .gamma = gamma, .beta2 = beta2};
        return phenom_normalized_rate(m, circuit, w_ref, t_ref);
    };
    auto unpack = [&](const Eigen::VectorXd& p) {
        PhenomPowerLaw m = guess;
        m.alpha = p(1);
        m.beta1 = p(2);
        m.gamma = p(4);
        m.beta2 = p(5);
        m.a = p(0) / flux_term(1.0, m.alpha, m.beta1);
        m.b = p(3) / charge_term(1.0, m.gamma, m.beta2);
        return m;
    };
    const ResidualFunction f = [&](const Eigen::VectorXd& p) {
        const PhenomPowerLaw m = unpack(p);
        Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
        for (std::size_t k = 0; k < data.size(); ++k) {
            const auto& d = data[k];
            const double w = d.sigma > 0.0 ? d.sigma / d.rate : 1.0;
            r(static_cast<Eigen::Index>(k)) =
                (std::log(phenom_normalized_rate(m, circuit, d.omega, d.t)) - std::log(d.rate)) / w;
        }
        return r;
    };
    double mean_log_rate = 0.0;
    for (const auto& d : data) mean_log_rate += std::log(d.rate);
    const double half_rate = 0.5 * std::exp(mean_log_rate / static_cast<double>(data.size()));
    std::vector<ParameterSpec> specs{
        {"flux_ref", guess.a > 0.0 ? flux_term(guess.a, guess.alpha, guess.beta1) : half_rate, 0.0, inf, true},
        {"alpha", guess.alpha, 1e-6, 3.0 - 1e-6},
        {"beta1", guess.beta1},
        {"charge_ref", guess.b > 0.0 ? charge_term(guess.b, guess.gamma, guess.beta2) : half_rate, 0.0, inf, true},
        {"gamma", guess.gamma},
        {"beta2", guess.beta2},
    };
    LmOptions opts;
    opts.starts = 5;
    opts.absolute_sigma = std::all_of(data.begin(), data.end(), [](const auto& d) { return d.sigma > 0.0; });
    const LmResult lm = levenberg_marquardt(f, specs, opts);
    if (lm.singular) throw NumericalError("fit_power_law_global: " + lm.message);
    PowerLawFit out;
    out.params = unpack(lm.params);
    // ln a = ln flux_ref + (alpha + 2) ln w_ref - beta1 ln t_ref + const, same for b.
    auto log_sigma = [&](int amp, int e1, int e2, double d1, double d2) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(6);
        g(amp) = 1.0 / lm.params(amp);
        g(e1) = d1;
        g(e2) = d2;
        return std::sqrt(std::max(g.dot(lm.covariance * g), 0.0));
    };
    out.sigmas = PhenomPowerLaw{};
    out.sigmas.a = out.params.a * log_sigma(0, 1, 2, std::log(w_ref), -std::log(t_ref));
    out.sigmas.alpha = lm.sigmas(1);
    out.sigmas.beta1 = lm.sigmas(2);
    out.sigmas.b = out.params.b * log_sigma(3, 4, 5, -std::log(w_ref), -std::log(t_ref));
    out.sigmas.gamma = lm.sigmas(4);
    out.sigmas.beta2 = lm.sigmas(5);
    out.sigmas.t = 0.0;
    out.residual_norm = lm.residual_norm();
    return out;
}

// ------------------------------------------------------------ field models

FieldFits fit_field_models(const std::vector<FieldPoint>& data) {
    if (data.size() < 5) throw ValidationError("fit_field_models: need >= 5 field points");
    double b_max = 0.0;
    for (const auto& d : data) {
        if (!(d.e_j > 0.0) || !std::isfinite(d.b) || !(d.sigma >= 0.0))
            throw ValidationError("fit_field_models: positive E_J and finite field required");
        b_max = std::max(b_max, std::abs(d.b));
    }
    const bool weighted = std::all_of(data.begin(), data.end(), [](const auto& d) { return d.sigma > 0.0; });

    // Quadratic seed: E_J ~ c0 + c1 B + c2 B^2 near the peak.
    Eigen::MatrixXd v(static_cast<Eigen::Index>(data.size()), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        v(i, 0) = 1.0;
        v(i, 1) = data[k].b;
        v(i, 2) = data[k].b * data[k].b;
        y(i) = data[k].e_j;
    }
    const Eigen::Vector3d q = v.colPivHouseholderQr().solve(y);
    double ej0 = *std::max_element(y.data(), y.data() + y.size());
    double b_delta = 0.0;
    double b_phi0 = 10.0 * std::max(b_max, 1.0);
    double b_c = 10.0 * std::max(b_max, 1.0);
    if (q(2) < 0.0) {
        b_delta = -q(1) / (2.0 * q(2));
        ej0 = q(0) - q(1) * q(1) / (4.0 * q(2));
        b_phi0 = constants::pi * std::sqrt(ej0 / (-6.0 * q(2)));
        b_c = std::sqrt(ej0 / (-2.0 * q(2)));
    }

    auto weight = [&](const FieldPoint& d) { return weighted ? d.sigma : 1.0; };
    LmOptions opts;
    opts.starts = 5;
    opts.absolute_sigma = weighted;

    FieldFits out;
    {
        const ResidualFunction f = [&](const Eigen::VectorXd& p) {
            FieldModelParams fm{p(0), p(1), p(2), 1.0};
            Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
            for (std::size_t k = 0; k < data.size(); ++k)
                r(static_cast<Eigen::Index>(k)) = (fraunhofer_ej(fm, data[k].b) - data[k].e_j) / weight(data[k]);
            return r;
        };
        std::vector<ParameterSpec> specs{
            {"ej0", ej0, 0.0, inf},
            {"b_delta", b_delta},
            {"b_phi0", b_phi0, 0.0, inf, true},
        };
        const LmResult lm = levenberg_marquardt(f, specs, opts);
        if (lm.singular) throw NumericalError("fit_field_models (Fraunhofer): " + lm.message);
        out.fraunhofer = {lm.params(0), lm.params(1), lm.params(2),
                          lm.sigmas(0), lm.sigmas(1), lm.sigmas(2), lm.residual_norm()};
    }
    {
        const ResidualFunction f = [&](const Eigen::VectorXd& p) {
            FieldModelParams fm{p(0), 0.0, 1.0, p(1)};
            Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
            for (std::size_t k = 0; k < data.size(); ++k)
                r(static_cast<Eigen::Index>(k)) =
                    (ginzburg_landau_ej(fm, data[k].b) - data[k].e_j) / weight(data[k]);
            return r;
        };
        std::vector<ParameterSpec> specs{
            {"ej0", ej0, 0.0, inf},
            {"b_c", std::max(b_c, 1.01 * b_max), b_max * (1.0 + 1e-9), inf, true},
        };
        const LmResult lm = levenberg_marquardt(f, specs, opts);
        if (lm.singular) throw NumericalError("fit_field_models (Ginzburg-Landau): " + lm.message);
        out.ginzburg_landau = {lm.params(0), lm.params(1), lm.sigmas(0), lm.sigmas(1), lm.residual_norm()};
    }
    return out;
}

// ------------------------------------------------------------ spectroscopy

SpectroscopyFit fit_hamiltonian_spectroscopy(const std::vector<TransitionPoint>& transitions,
                                             const SpectroscopyFitOptions& opts,
                                             const std::vector<DispersivePoint>& dispersive) {
    opts.guess.validate();
    std::set<std::pair<int, int>> pairs;
    int max_level = 1;
    for (const auto& t : transitions) {
        if (t.level_i < 0 || t.level_j < 0 || t.level_i == t.level_j || !(t.sigma > 0.0))
            throw ValidationError("fit_hamiltonian_spectroscopy: invalid transition row");
        pairs.insert({std::min(t.level_i, t.level_j), std::max(t.level_i, t.level_j)});
        max_level = std::max({max_level, t.level_i, t.level_j});
    }
    const bool with_res = opts.resonator_guess.has_value() && !dispersive.empty();
    const int levels = with_res ? std::max(max_level + 1, 20) : max_level + 1;

    std::vector<std::string> names{"e_c", "e_j", "e_l"};
    std::vector<ParameterSpec> specs{
        {"e_c", opts.guess.e_c, 0.0, inf, true, opts.fix_e_c},
        {"e_j", opts.guess.e_j, 0.0, inf, true},
        {"e_l", opts.guess.e_l, 0.0, inf, true},
    };
    if (with_res) {
        specs.push_back({"f_res", opts.resonator_guess->f_res, 0.0, inf, true});
        specs.push_back({"g", opts.resonator_guess->g, 0.0, inf, true});
    }

    const ResidualFunction f = [&](const Eigen::VectorXd& p) {
        CircuitParams c{p(0), p(1), p(2), 0.0};
        std::map<double, EigenSolution> cache;
        auto sol = [&](double phi) -> const EigenSolution& {
            auto it = cache.find(phi);
            if (it == cache.end()) it = cache.emplace(phi, diagonalize(c.at_flux(phi), levels)).first;
            return it->second;
        };
        Eigen::VectorXd r(static_cast<Eigen::Index>(transitions.size() + 2 * (with_res ? dispersive.size() : 0)));
        Eigen::Index k = 0;
        for (const auto& t : transitions)
            r(k++) = (sol(t.phi_ext).frequency(t.level_i, t.level_j) - t.frequency) / t.sigma;
        if (with_res) {
            ResonatorParams res = *opts.resonator_guess;
            res.f_res = p(3);
            res.g = p(4);
            for (const auto& d : dispersive) {
                const auto chi = dispersive_shifts(sol(d.phi_ext), res);
                r(k++) = (chi.chi0 - d.chi0) / d.sigma;
                r(k++) = (chi.chi1 - d.chi1) / d.sigma;
            }
        }
        return r;
    };

    // Identifiability is checked at the starting point before fitting.
    if (transitions.size() < 6 || pairs.size() < 2) {
        Eigen::VectorXd p0(static_cast<Eigen::Index>(specs.size()));
        for (std::size_t k = 0; k < specs.size(); ++k) p0(static_cast<Eigen::Index>(k)) = specs[k].initial;
        std::vector<std::string> free_names;
        std::vector<Eigen::Index> free_cols;
        for (std::size_t k = 0; k < specs.size(); ++k)
            if (!specs[k].fixed) {
                free_names.push_back(specs[k].name);
                free_cols.push_back(static_cast<Eigen::Index>(k));
            }
        const Eigen::MatrixXd j_all = numerical_jacobian(f, p0, 1e-6);
        Eigen::MatrixXd j(j_all.rows(), static_cast<Eigen::Index>(free_cols.size()));
        for (std::size_t k = 0; k < free_cols.size(); ++k) j.col(static_cast<Eigen::Index>(k)) = j_all.col(free_cols[k]);
        std::ostringstream os;
        os << "fit_hamiltonian_spectroscopy: need >= 6 points over >= 2 transitions (got "
           << transitions.size() << " points, " << pairs.size() << " transitions); "
           << "least constrained parameter: " << degenerate_pair(j, free_names);
        throw ValidationError(os.str());
    }

    LmOptions lm_opts = opts.lm;
    lm_opts.absolute_sigma = true;
    const LmResult lm = levenberg_marquardt(f, specs, lm_opts);
    if (lm.singular) throw NumericalError("fit_hamiltonian_spectroscopy: " + lm.message);

    SpectroscopyFit out;
    out.params = {lm.params(0), lm.params(1), lm.params(2), 0.0};
    out.sigma_e_c = lm.sigmas(0);
    out.sigma_e_j = lm.sigmas(1);
    out.sigma_e_l = lm.sigmas(2);
    if (with_res) {
        ResonatorParams res = *opts.resonator_guess;
        res.f_res = lm.params(3);
        res.g = lm.params(4);
        out.resonator = res;
        out.sigma_f_res = lm.sigmas(3);
        out.sigma_g = lm.sigmas(4);
    }
    out.residual_norm = lm.residual_norm();
    return out;
}

// ------------------------------------------------------------- temperature

double effective_temperature(double p0, double p1, double f01) {
    if (!(p0 > 0.0) || !(p1 > 0.0)) throw ValidationError("effective_temperature: p0, p1 must be positive");
    if (!(f01 > 0.0)) throw ValidationError("effective_temperature: f01 must be positive");
    if (p1 >= p0) throw ValidationError("effective_temperature: p1 >= p0 implies a negative temperature");
    return constants::h * f01 / (constants::k_b * std::log(p0 / p1));
}

}  // namespace fluxonium
