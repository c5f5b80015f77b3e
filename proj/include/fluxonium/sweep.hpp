// sweep.hpp: model evaluation over flux, temperature and field grids, and
// seeded synthetic datasets drawn from the same model.

#pragma once

#include "fluxonium/config.hpp"
#include "fluxonium/dephasing.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fluxonium {

enum class SweepKind { flux, temperature, field };

SweepKind parse_sweep_kind(const std::string& name);
std::string to_string(SweepKind k);

struct SweepRow {
    double phi_ext{0.0};      // Phi0
    double temperature{0.0};  // K, 0 when the channels keep their own
    double field{0.0};        // G
    double e_j{0.0};          // Hz
    double f01{0.0};          // Hz
    double phi01{0.0};
    double n01{0.0};
    double sin01{0.0};
    std::vector<double> channel_gamma;  // two-level Gamma1 per channel, 1/s
    double gamma1_two_level{0.0};
    double gamma1_eff{0.0};
    double m_metric{0.0};
};

struct SweepResult {
    SweepKind kind{SweepKind::flux};
    std::vector<std::string> channel_names;
    std::vector<SweepRow> rows;
    std::string config_hash;
    std::string version;
};

/// Channels and circuit at one grid point: temperature sweeps retune every
/// channel bath (and A_Phi when it scales with T); field sweeps set E_J from
/// the Fraunhofer pattern and shift the gap and x_qp of the QP channels.
struct PointModel {
    CircuitParams circuit;
    std::vector<NoiseChannel> channels;
};
PointModel point_model(const RunConfig& config, SweepKind kind, double t, double b);

/// Flux grid crossed with the temperature or field list. Rows come out
/// flux-major in grid order regardless of thread scheduling. Errors carry the
/// failing grid point.
SweepResult run_sweep(const RunConfig& config, SweepKind kind);

SweepRow evaluate_point(const RunConfig& config, SweepKind kind, double phi_ext, double t, double b);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// T1 = 1 / Gamma1_eff over the sweep grid with multiplicative lognormal
/// noise of relative width noise_level. Error bars are max(noise_level, 1%)
/// of the drawn value.
T1Dataset generate_synthetic(const RunConfig& config, double noise_level, std::uint64_t seed,
                             SweepKind kind = SweepKind::flux);

/// Same draw from an already evaluated sweep.
T1Dataset synthetic_from_sweep(const SweepResult& sweep, double noise_level, std::uint64_t seed);

struct EchoSynthesis {
    EchoModel truth;                 // slope is overwritten per record
    std::vector<double> slopes;      // rad/s per Phi0
    std::vector<double> times;       // s
    double noise{0.0};               // additive Gaussian, absolute
    double amplitude{1.0};
    double offset{0.0};
};

/// One echo trace per slope: amplitude * envelope + offset + noise.
EchoDataset generate_synthetic_echo(const EchoSynthesis& s, std::uint64_t seed);

}  // namespace fluxonium
