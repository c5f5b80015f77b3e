// report.hpp: JSON fit reports and SVG line plots.

#pragma once

#include "fluxonium/fitting.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fluxonium {

struct Provenance {
    std::string config_hash;
    std::string version;
    std::uint64_t seed{0};
};

/// {"provenance": {...}, "kind": kind, "parameters": [{name, value, sigma,
/// ci_low, ci_high}], "residual_norm", "converged", "n_bootstrap", "message"}.
std::string fit_report_json(const FitResult& fit, const std::string& kind, const Provenance& p);

/// Named scalars under "results".
std::string scalar_report_json(const std::vector<std::pair<std::string, double>>& values, const std::string& kind,
                               const Provenance& p);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers{false};
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y{false};
    int width{720};
    int height{480};
};

void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series, const PlotOptions& opts);

/// Plotted series as columns series,x,y.
void write_plot_csv(std::ostream& out, const std::vector<PlotSeries>& series);

}  // namespace fluxonium
