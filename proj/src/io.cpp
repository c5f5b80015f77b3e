// io.cpp

#include "fluxonium/io.hpp"

#include "fluxonium/constants.hpp"
#include "fluxonium/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fluxonium {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string where(std::size_t line) { return "line " + std::to_string(line); }

double parse_double(const std::string& cell, std::size_t line, const std::string& column) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end || cell.empty())
        throw ValidationError(where(line) + ": column '" + column + "' is not a number: '" + cell + "'");
    return v;
}

int parse_int(const std::string& cell, std::size_t line, const std::string& column) {
    int v = 0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end || cell.empty())
        throw ValidationError(where(line) + ": column '" + column + "' is not an integer: '" + cell + "'");
    return v;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, cells)
};

Table read_table(std::istream& in) {
    Table t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto cells = split_csv(s);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ValidationError(where(n) + ": expected " + std::to_string(t.header.size()) + " columns, found " +
                                  std::to_string(cells.size()));
        t.rows.emplace_back(n, std::move(cells));
    }
    if (t.header.empty()) throw ValidationError("dataset: missing header row");
    return t;
}

void require_header(const Table& t, const std::vector<std::string>& required,
                    const std::vector<std::string>& optional, const std::string& schema) {
    std::size_t k = 0;
    for (; k < required.size(); ++k)
        if (k >= t.header.size() || t.header[k] != required[k])
            throw ValidationError(schema + " header must start with " + required[k] + " at column " +
                                  std::to_string(k + 1));
    for (; k < t.header.size(); ++k)
        if (std::find(optional.begin(), optional.end(), t.header[k]) == optional.end())
            throw ValidationError(schema + " header has unexpected column '" + t.header[k] + "'");
}

void reject(LoadReport* report, std::size_t line, const std::string& why) {
    if (report) report->rejected.push_back({line, why});
}

void write_provenance(std::ostream& out, const std::string& provenance) {
    if (!provenance.empty()) out << "# " << provenance << '\n';
}

T1Dataset parse_t1(const Table& t, LoadReport* report) {
    require_header(t, {"phi_ext_phi0", "t1_us", "t1_err_us"}, {"temp_mK", "field_G"}, "t1_flux");
    std::map<std::string, std::size_t> col;
    for (std::size_t k = 0; k < t.header.size(); ++k) col[t.header[k]] = k;
    T1Dataset ds;
    for (const auto& [line, c] : t.rows) {
        T1Record r;
        r.phi_ext = parse_double(c[0], line, "phi_ext_phi0");
        const double t1 = parse_double(c[1], line, "t1_us");
        const double err = parse_double(c[2], line, "t1_err_us");
        if (col.count("temp_mK")) r.temperature = units::mk_to_k(parse_double(c[col["temp_mK"]], line, "temp_mK"));
        if (col.count("field_G")) r.field = parse_double(c[col["field_G"]], line, "field_G");
        if (!(t1 > 0.0)) {
            reject(report, line, "non-positive t1_us");
            continue;
        }
        if (!(err > 0.0)) {
            reject(report, line, "non-positive t1_err_us");
            continue;
        }
        if (r.temperature && !(*r.temperature > 0.0)) {
            reject(report, line, "non-positive temperature");
            continue;
        }
        r.t1 = units::us_to_s(t1);
        r.sigma = units::us_to_s(err);
        ds.records.push_back(r);
    }
    return ds;
}

EchoDataset parse_echo(const Table& t, LoadReport* report) {
    require_header(t, {"trace_id", "dfdphi_ghz_per_phi0", "t1_us", "time_us", "signal"}, {}, "echo");
    EchoDataset ds;
    std::map<int, std::size_t> index;
    for (const auto& [line, c] : t.rows) {
        const int id = parse_int(c[0], line, "trace_id");
        const double slope = constants::two_pi * units::ghz_to_hz(parse_double(c[1], line, "dfdphi_ghz_per_phi0"));
        const double t1 = units::us_to_s(parse_double(c[2], line, "t1_us"));
        const double time = units::us_to_s(parse_double(c[3], line, "time_us"));
        const double signal = parse_double(c[4], line, "signal");
        if (!(t1 > 0.0) || time < 0.0) {
            reject(report, line, "non-positive t1_us or negative time_us");
            continue;
        }
        auto it = index.find(id);
        if (it == index.end()) {
            it = index.emplace(id, ds.records.size()).first;
            EchoRecord r;
            r.slope = std::abs(slope);
            r.t1 = t1;
            ds.records.push_back(r);
        }
        auto& rec = ds.records[it->second];
        if (rec.slope != std::abs(slope) || rec.t1 != t1)
            throw ValidationError(where(line) + ": trace " + std::to_string(id) + " changes slope or t1");
        rec.times.push_back(time);
        rec.values.push_back(signal);
    }
    return ds;
}

std::vector<TransitionPoint> parse_spectroscopy(const Table& t, LoadReport* report) {
    require_header(t, {"phi_ext_phi0", "level_i", "level_j", "freq_ghz", "freq_err_mhz"}, {}, "spectroscopy");
    std::vector<TransitionPoint> out;
    for (const auto& [line, c] : t.rows) {
        TransitionPoint p;
        p.phi_ext = parse_double(c[0], line, "phi_ext_phi0");
        p.level_i = parse_int(c[1], line, "level_i");
        p.level_j = parse_int(c[2], line, "level_j");
        p.frequency = units::ghz_to_hz(parse_double(c[3], line, "freq_ghz"));
        p.sigma = units::mhz_to_hz(parse_double(c[4], line, "freq_err_mhz"));
        if (p.level_i < 0 || p.level_j < 0 || p.level_i == p.level_j || !(p.sigma > 0.0)) {
            reject(report, line, "invalid level pair or non-positive error");
            continue;
        }
        out.push_back(p);
    }
    return out;
}

std::vector<FieldPoint> parse_field(const Table& t, LoadReport* report) {
    require_header(t, {"field_G", "ej_ghz", "ej_err_ghz"}, {}, "ej_field");
    std::vector<FieldPoint> out;
    for (const auto& [line, c] : t.rows) {
        FieldPoint p;
        p.b = parse_double(c[0], line, "field_G");
        p.e_j = units::ghz_to_hz(parse_double(c[1], line, "ej_ghz"));
        p.sigma = units::ghz_to_hz(parse_double(c[2], line, "ej_err_ghz"));
        if (!(p.e_j > 0.0) || p.sigma < 0.0) {
            reject(report, line, "non-positive ej_ghz or negative error");
            continue;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

DatasetSchema parse_schema(std::string_view name) {
    if (name == "t1_flux") return DatasetSchema::t1_flux;
    if (name == "echo") return DatasetSchema::echo;
    if (name == "spectroscopy") return DatasetSchema::spectroscopy;
    if (name == "ej_field") return DatasetSchema::ej_field;
    throw ValidationError("unknown dataset schema '" + std::string(name) + "'");
}

std::string to_string(DatasetSchema s) {
    switch (s) {
        case DatasetSchema::t1_flux: return "t1_flux";
        case DatasetSchema::echo: return "echo";
        case DatasetSchema::spectroscopy: return "spectroscopy";
        case DatasetSchema::ej_field: return "ej_field";
    }
    return "unknown";
}

Dataset parse_dataset(std::istream& in, DatasetSchema schema, LoadReport* report) {
    const Table t = read_table(in);
    if (report) report->rows = t.rows.size();
    switch (schema) {
        case DatasetSchema::t1_flux: return parse_t1(t, report);
        case DatasetSchema::echo: return parse_echo(t, report);
        case DatasetSchema::spectroscopy: return parse_spectroscopy(t, report);
        case DatasetSchema::ej_field: return parse_field(t, report);
    }
    throw ValidationError("unknown dataset schema");
}

Dataset load_dataset(const std::string& path, DatasetSchema schema, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset '" + path + "'");
    return parse_dataset(in, schema, report);
}

T1Dataset load_t1_dataset(const std::string& path, LoadReport* report) {
    return std::get<T1Dataset>(load_dataset(path, DatasetSchema::t1_flux, report));
}

void write_t1_dataset(std::ostream& out, const T1Dataset& ds, const std::string& provenance) {
    write_provenance(out, provenance);
    const bool temp = std::any_of(ds.records.begin(), ds.records.end(), [](const auto& r) { return r.temperature.has_value(); });
    const bool field = std::any_of(ds.records.begin(), ds.records.end(), [](const auto& r) { return r.field.has_value(); });
    if (temp && !std::all_of(ds.records.begin(), ds.records.end(), [](const auto& r) { return r.temperature.has_value(); }))
        throw ValidationError("write_t1_dataset: temperature must be set on all records or none");
    if (field && !std::all_of(ds.records.begin(), ds.records.end(), [](const auto& r) { return r.field.has_value(); }))
        throw ValidationError("write_t1_dataset: field must be set on all records or none");
    out << "phi_ext_phi0,t1_us,t1_err_us" << (temp ? ",temp_mK" : "") << (field ? ",field_G" : "") << '\n';
    for (const auto& r : ds.records) {
        out << format_number(r.phi_ext) << ',' << format_number(units::s_to_us(r.t1)) << ','
            << format_number(units::s_to_us(r.sigma));
        if (temp) out << ',' << format_number(units::k_to_mk(*r.temperature));
        if (field) out << ',' << format_number(*r.field);
        out << '\n';
    }
}

void write_echo_dataset(std::ostream& out, const EchoDataset& ds, const std::string& provenance) {
    write_provenance(out, provenance);
    out << "trace_id,dfdphi_ghz_per_phi0,t1_us,time_us,signal\n";
    for (std::size_t k = 0; k < ds.records.size(); ++k) {
        const auto& r = ds.records[k];
        if (!r.has_trace()) throw ValidationError("write_echo_dataset: records need raw traces");
        for (std::size_t i = 0; i < r.times.size(); ++i)
            out << k << ',' << format_number(units::hz_to_ghz(r.slope / constants::two_pi)) << ','
                << format_number(units::s_to_us(r.t1)) << ',' << format_number(units::s_to_us(r.times[i])) << ','
                << format_number(r.values[i]) << '\n';
    }
}

void write_transitions(std::ostream& out, const std::vector<TransitionPoint>& pts, const std::string& provenance) {
    write_provenance(out, provenance);
    out << "phi_ext_phi0,level_i,level_j,freq_ghz,freq_err_mhz\n";
    for (const auto& p : pts)
        out << format_number(p.phi_ext) << ',' << p.level_i << ',' << p.level_j << ','
            << format_number(units::hz_to_ghz(p.frequency)) << ',' << format_number(units::hz_to_mhz(p.sigma)) << '\n';
}

void write_field_points(std::ostream& out, const std::vector<FieldPoint>& pts, const std::string& provenance) {
    write_provenance(out, provenance);
    out << "field_G,ej_ghz,ej_err_ghz\n";
    for (const auto& p : pts)
        out << format_number(p.b) << ',' << format_number(units::hz_to_ghz(p.e_j)) << ','
            << format_number(units::hz_to_ghz(p.sigma)) << '\n';
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string version_string() { return "fluxonium-noise 1.0.0"; }

}  // namespace fluxonium
