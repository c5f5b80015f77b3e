// fitting.hpp: dataset-level fits built on the least-squares core.

#pragma once

#include "fluxonium/field.hpp"
#include "fluxonium/noise.hpp"
#include "fluxonium/optimize.hpp"
#include "fluxonium/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fluxonium {

// ---------------------------------------------------------------- datasets

struct T1Record {
    double phi_ext{0.0};  // Phi_ext / Phi0
    double t1{0.0};       // s
    double sigma{0.0};    // s
    std::optional<double> temperature;  // K
    std::optional<double> field;        // G
};

struct T1Dataset {
    std::vector<T1Record> records;

    void validate() const;
    [[nodiscard]] std::size_t size() const { return records.size(); }
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> sigmas;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    double residual_norm{0.0};
    int n_bootstrap{0};
    std::uint64_t seed{0};
    bool converged{false};
    std::string message;

    [[nodiscard]] std::size_t index(const std::string& name) const;
    [[nodiscard]] double value(const std::string& name) const { return values[index(name)]; }
    [[nodiscard]] double sigma(const std::string& name) const { return sigmas[index(name)]; }
};

// -------------------------------------------------------------- exponential

struct ExponentialFit {
    double a{0.0};
    double t1{0.0};
    double c{0.0};
    double sigma_a{0.0};
    double sigma_t1{0.0};
    double sigma_c{0.0};
    bool rejected{false};  // some relative parameter error above 0.3
    bool converged{false};
    double residual_norm{0.0};
};

/// A exp(-t / T1) + C by least squares.
ExponentialFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values);

/// Relative-error threshold above which a fitted parameter is rejected.
inline constexpr double rejection_threshold = 0.3;

// ---------------------------------------------------------- composite T1 fit

enum class LevelMode { two, n };

/// A channel field left free in the fit, addressed as (channel index, field).
struct FreeParameter {
    std::size_t channel{0};
    std::string field;
    bool log_scale{true};
    double lower{0.0};
    double upper{std::numeric_limits<double>::infinity()};
};

struct CompositeFitSpec {
    CircuitParams circuit;
    std::vector<NoiseChannel> channels;  // values double as starting guesses
    std::vector<FreeParameter> free;
    LevelMode level_mode{LevelMode::two};
    int n_levels{6};
    LmOptions lm{.starts = 5};

    [[nodiscard]] std::vector<std::string> parameter_names() const;
};

/// Model T1 (s) at each record flux for the given free-parameter values.
std::vector<double> composite_model_t1(const CompositeFitSpec& spec, const T1Dataset& data,
                                       const std::vector<double>& free_values);

/// Gamma1 from a channel list at one bias: the 0-1 sum or the dominant
/// mode of the N-level rate matrix starting from p1 = 1.
double model_gamma1(const std::vector<NoiseChannel>& channels, const EigenSolution& sol,
                    LevelMode mode, int n_levels);

FitResult fit_t1_composite(const T1Dataset& data, const CompositeFitSpec& spec);

/// Percentile bootstrap of fit_t1_composite. Deterministic in seed.
FitResult bootstrap_confidence(const T1Dataset& data, const CompositeFitSpec& spec, int n,
                               std::uint64_t seed);

// -------------------------------------------------------- normalized rates

struct NormalizedRatePoint {
    double f01{0.0};    // Hz
    double rate{0.0};   // Gamma1 / |n01|^2, 1/s
    double sigma{0.0};  // optional, 0 means unweighted
};

struct NormalizedRateFit {
    double a{0.0};
    double mu{0.0};
    double c{0.0};
    double sigma_a{0.0};
    double sigma_mu{0.0};
    double sigma_c{0.0};
    bool c_constrained{false};  // refit with C = 0
    double residual_norm{0.0};
};

/// y = A / f^mu + C with f in GHz, least squares in log y.
NormalizedRateFit fit_normalized_rate(const std::vector<NormalizedRatePoint>& data);

// ------------------------------------------------------- global power law

struct PowerLawPoint {
    double omega{0.0};  // rad/s
    double t{0.0};      // K
    double rate{0.0};   // Gamma1 / |n01|^2
    double sigma{0.0};
};

struct PowerLawFit {
    PhenomPowerLaw params;
    PhenomPowerLaw sigmas;
    double residual_norm{0.0};
};

/// Simultaneous fit over all (omega, T). guess supplies the starting point;
/// a or b left at 0 starts that term at half the mean data rate.
PowerLawFit fit_power_law_global(const std::vector<PowerLawPoint>& data,
                                 const CircuitParams& circuit, const PhenomPowerLaw& guess);

// ------------------------------------------------------------ field models

struct FieldPoint {
    double b{0.0};      // G
    double e_j{0.0};    // Hz
    double sigma{0.0};  // Hz, 0 for unweighted
};

struct FraunhoferFit {
    double ej0{0.0}, b_delta{0.0}, b_phi0{0.0};
    double sigma_ej0{0.0}, sigma_b_delta{0.0}, sigma_b_phi0{0.0};
    double residual_norm{0.0};
};

struct GinzburgLandauFit {
    double ej0{0.0}, b_c{0.0};
    double sigma_ej0{0.0}, sigma_b_c{0.0};
    double residual_norm{0.0};
};

struct FieldFits {
    FraunhoferFit fraunhofer;
    GinzburgLandauFit ginzburg_landau;
};

FieldFits fit_field_models(const std::vector<FieldPoint>& data);

// ------------------------------------------------------------ spectroscopy

struct TransitionPoint {
    double phi_ext{0.0};  // Phi0
    int level_i{0};
    int level_j{1};
    double frequency{0.0};  // Hz
    double sigma{1e6};
};

struct DispersivePoint {
    double phi_ext{0.0};  // Phi0
    double chi0{0.0};     // Hz
    double chi1{0.0};
    double sigma{1e5};
};

struct SpectroscopyFitOptions {
    CircuitParams guess;
    bool fix_e_c{false};
    std::optional<ResonatorParams> resonator_guess;  // fit f_res and g with dispersive data
    LmOptions lm{.starts = 3};
};

struct SpectroscopyFit {
    CircuitParams params;
    double sigma_e_c{0.0}, sigma_e_j{0.0}, sigma_e_l{0.0};
    std::optional<ResonatorParams> resonator;
    double sigma_f_res{0.0}, sigma_g{0.0};
    double residual_norm{0.0};
};

SpectroscopyFit fit_hamiltonian_spectroscopy(const std::vector<TransitionPoint>& transitions,
                                             const SpectroscopyFitOptions& opts,
                                             const std::vector<DispersivePoint>& dispersive = {});

// ----------------------------------------------------------- temperature

/// h f01 / (k ln(p0 / p1)).
double effective_temperature(double p0, double p1, double f01);

}  // namespace fluxonium
