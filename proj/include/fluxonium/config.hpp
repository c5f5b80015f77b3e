// config.hpp: run configuration read from TOML.
//
// All quantities are SI except flux (Phi0) and magnetic field (G):
//
//   seed = 7
//   [circuit]  e_c = 0.957e9   e_j = 6.814e9   e_l = 0.56e9        # Hz
//   [levels]   mode = "n"      n = 6
//   [sweep]    flux = { start = 0.0, stop = 0.5, points = 101 }    # or a list
//              temperatures = [0.05]                               # K
//              fields = [0.0]                                      # G
//   [field]    ej0 = 6.814e9   b_delta = 2.2   b_phi0 = 857.0   b_c = 487.0
//   [output]   dir = "out"
//   [[channel]]
//   type = "flux_noise"   a_phi = 6.25e-14   alpha = 0.62   free = ["a_phi"]
//
// Channel keys are the parameter names of noise.hpp. Line channels accept
// chain = [[db, kelvin], ...] and source_temperature; flux_noise accepts
// scale_with_temperature.

#pragma once

#include "fluxonium/field.hpp"
#include "fluxonium/fitting.hpp"
#include "fluxonium/noise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fluxonium {

struct RunConfig {
    CircuitParams circuit;
    std::vector<NoiseChannel> channels;
    std::vector<FreeParameter> free;
    LevelMode level_mode{LevelMode::n};
    int n_levels{6};
    std::vector<double> flux_grid;                // Phi0
    std::vector<double> temperatures{0.05};       // K
    std::vector<double> fields{0.0};              // G
    std::optional<FieldModelParams> field_model;
    std::uint64_t seed{0};
    std::string output_dir{"."};

    void validate() const;
};

/// Default channel of the given type name, see channel_name.
NoiseChannel make_channel(std::string_view type);

RunConfig parse_config(std::string_view toml_text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

/// Canonical TOML of a config; parse_config(to_toml(c)) reproduces c exactly.
std::string to_toml(const RunConfig& config);

/// FNV-1a hash of the canonical TOML, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Qubit and channels used throughout the examples and the acceptance checks.
std::string baseline_config_toml();
RunConfig baseline_config();

/// Composite-fit specification from the config's channels and free list.
CompositeFitSpec fit_spec(const RunConfig& config);

}  // namespace fluxonium
