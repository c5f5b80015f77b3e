// field.cpp

#include "fluxonium/field.hpp"

#include "fluxonium/errors.hpp"
#include "fluxonium/noise.hpp"

#include <cmath>
#include <sstream>

namespace fluxonium {

namespace {
constexpr double tesla_per_gauss = 1e-4;
}

void FieldModelParams::validate() const {
    if (!(b_phi0 > 0.0)) throw ValidationError("FieldModelParams: b_phi0 must be positive");
    if (!(b_c > 0.0)) throw ValidationError("FieldModelParams: b_c must be positive");
    if (!(gap_delta0 > 0.0)) throw ValidationError("FieldModelParams: gap_delta0 must be positive");
    if (!(x_qp0 >= 0.0)) throw ValidationError("FieldModelParams: x_qp0 must be >= 0");
}

double sinc_normalized(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - (constants::pi * x) * (constants::pi * x) / 6.0;
    const double px = constants::pi * x;
    return std::sin(px) / px;
}

double fraunhofer_ej(const FieldModelParams& fm, double b) {
    fm.validate();
    return fm.ej0 * std::abs(sinc_normalized((b - fm.b_delta) / fm.b_phi0));
}

double ginzburg_landau_ej(const FieldModelParams& fm, double b) {
    fm.validate();
    const double r = b / fm.b_c;
    if (std::abs(r) >= 1.0) return 0.0;
    return fm.ej0 * std::sqrt(1.0 - r * r);
}

double gap_at_field(const FieldModelParams& fm, double b) {
    fm.validate();
    if (std::abs(b) >= fm.b_c) {
        std::ostringstream os;
        os << "gap_at_field: |B| = " << std::abs(b) << " G is not below B_c = " << fm.b_c << " G";
        throw ValidationError(os.str());
    }
    const double r = b / fm.b_c;
    return fm.gap_delta0 * std::sqrt(1.0 - r * r);
}

FieldDependence field_dependence(const FieldModelParams& fm, double b, double t) {
    if (!(t > 0.0)) throw ValidationError("field_dependence: temperature must be positive");
    FieldDependence out;
    out.e_j = fraunhofer_ej(fm, b);
    out.e_j_gl = ginzburg_landau_ej(fm, b);
    out.gap = gap_at_field(fm, b);
    out.delta_x_qp = thermal_qp_density(out.gap, t, fm.x_qp0) -
                     thermal_qp_density(fm.gap_delta0, t, fm.x_qp0);
    return out;
}

double junction_length(double b_phi0, double penetration_depth, double barrier_thickness) {
    if (!(b_phi0 > 0.0) || !(penetration_depth >= 0.0) || !(barrier_thickness >= 0.0))
        throw ValidationError("junction_length: positive period and nonnegative lengths required");
    const double width = 2.0 * penetration_depth + barrier_thickness;
    if (!(width > 0.0)) throw ValidationError("junction_length: zero magnetic thickness");
    return constants::phi0 / (b_phi0 * tesla_per_gauss * width);
}

}  // namespace fluxonium
