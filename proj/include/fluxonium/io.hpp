// io.hpp: CSV datasets, unit conversions and number formatting.
//
// Schemas (header row required, '#' lines are comments):
//   t1_flux       phi_ext_phi0,t1_us,t1_err_us[,temp_mK][,field_G]
//   echo          trace_id,dfdphi_ghz_per_phi0,t1_us,time_us,signal
//   spectroscopy  phi_ext_phi0,level_i,level_j,freq_ghz,freq_err_mhz
//   ej_field      field_G,ej_ghz,ej_err_ghz

#pragma once

#include "fluxonium/dephasing.hpp"
#include "fluxonium/fitting.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fluxonium {

enum class DatasetSchema { t1_flux, echo, spectroscopy, ej_field };

DatasetSchema parse_schema(std::string_view name);
std::string to_string(DatasetSchema s);

namespace units {
inline double us_to_s(double v) { return v * 1e-6; }
inline double s_to_us(double v) { return v * 1e6; }
inline double mk_to_k(double v) { return v * 1e-3; }
inline double k_to_mk(double v) { return v * 1e3; }
inline double ghz_to_hz(double v) { return v * 1e9; }
inline double hz_to_ghz(double v) { return v * 1e-9; }
inline double mhz_to_hz(double v) { return v * 1e6; }
inline double hz_to_mhz(double v) { return v * 1e-6; }
}  // namespace units

struct RejectedRow {
    std::size_t line{0};
    std::string reason;
};

struct LoadReport {
    std::size_t rows{0};
    std::vector<RejectedRow> rejected;
};

using Dataset = std::variant<T1Dataset, EchoDataset, std::vector<TransitionPoint>, std::vector<FieldPoint>>;

/// Reads a CSV of the given schema. Malformed rows throw ValidationError
/// naming the line; physically invalid rows are skipped into the report.
Dataset load_dataset(const std::string& path, DatasetSchema schema, LoadReport* report = nullptr);
Dataset parse_dataset(std::istream& in, DatasetSchema schema, LoadReport* report = nullptr);

T1Dataset load_t1_dataset(const std::string& path, LoadReport* report = nullptr);

/// Writers emit an optional '#' provenance line before the header.
void write_t1_dataset(std::ostream& out, const T1Dataset& ds, const std::string& provenance = {});
void write_echo_dataset(std::ostream& out, const EchoDataset& ds, const std::string& provenance = {});
void write_transitions(std::ostream& out, const std::vector<TransitionPoint>& pts,
                       const std::string& provenance = {});
void write_field_points(std::ostream& out, const std::vector<FieldPoint>& pts,
                        const std::string& provenance = {});

/// Nine significant digits.
std::string format_number(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Library version string embedded in outputs.
std::string version_string();

}  // namespace fluxonium
