// report.cpp

#include "fluxonium/report.hpp"

#include "fluxonium/errors.hpp"
#include "fluxonium/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace fluxonium {

namespace {

using nlohmann::ordered_json;

// JSON has no infinities; non-finite numbers become strings.
ordered_json num(double v) {
    if (std::isfinite(v)) return std::stod(format_number(v));
    return format_number(v);
}

ordered_json provenance_json(const Provenance& p) {
    return {{"config_hash", p.config_hash}, {"version", p.version}, {"seed", p.seed}};
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

}  // namespace

std::string fit_report_json(const FitResult& fit, const std::string& kind, const Provenance& p) {
    ordered_json j;
    j["provenance"] = provenance_json(p);
    j["kind"] = kind;
    ordered_json params = ordered_json::array();
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        ordered_json e;
        e["name"] = fit.names[i];
        e["value"] = num(fit.values[i]);
        e["sigma"] = num(i < fit.sigmas.size() ? fit.sigmas[i] : std::numeric_limits<double>::quiet_NaN());
        if (i < fit.ci_low.size()) e["ci_low"] = num(fit.ci_low[i]);
        if (i < fit.ci_high.size()) e["ci_high"] = num(fit.ci_high[i]);
        params.push_back(e);
    }
    j["parameters"] = params;
    j["residual_norm"] = num(fit.residual_norm);
    j["converged"] = fit.converged;
    j["n_bootstrap"] = fit.n_bootstrap;
    j["message"] = fit.message;
    return j.dump(2) + "\n";
}

std::string scalar_report_json(const std::vector<std::pair<std::string, double>>& values, const std::string& kind,
                               const Provenance& p) {
    ordered_json j;
    j["provenance"] = provenance_json(p);
    j["kind"] = kind;
    ordered_json r = ordered_json::object();
    for (const auto& [k, v] : values) r[k] = num(v);
    j["results"] = r;
    return j.dump(2) + "\n";
}

void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series, const PlotOptions& o) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto ty = [&](double y) { return o.log_y ? std::log10(y) : y; };
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw ValidationError("write_svg_plot: x and y sizes differ");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (o.log_y && s.y[i] <= 0.0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double ml = 70, mr = 20, mt = 36, mb = 50;
    const double pw = o.width - ml - mr, ph = o.height - mt - mb;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double gx = ml + pw * k / 4.0, gy = mt + ph * (1.0 - k / 4.0);
        out << "<text x=\"" << gx << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">" << format_number(fx)
            << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
            << format_number(o.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape_xml(o.title) << "</text>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << o.height - 10 << "\" text-anchor=\"middle\">"
        << escape_xml(o.x_label) << "</text>\n";
    out << "<text transform=\"translate(16," << mt + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape_xml(o.y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % (sizeof palette / sizeof palette[0])];
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.y[i]) || (o.log_y && s.y[i] <= 0.0)) continue;
                out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << color
                    << "\"/>\n";
            }
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.y[i]) || (o.log_y && s.y[i] <= 0.0)) continue;
                out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            out << "\"/>\n";
        }
        out << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 16 + 14 * k << "\" fill=\"" << color << "\">"
            << escape_xml(s.label) << "</text>\n";
    }
    out << "</svg>\n";
}

void write_plot_csv(std::ostream& out, const std::vector<PlotSeries>& series) {
    out << "series,x,y\n";
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            out << s.label << ',' << format_number(s.x[i]) << ',' << format_number(s.y[i]) << '\n';
}

}  // namespace fluxonium
