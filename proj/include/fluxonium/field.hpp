// field.hpp: in-plane magnetic-field dependence of the junction parameters.

#pragma once

#include "fluxonium/constants.hpp"

namespace fluxonium {

/// Fields in gauss, ej0 in Hz, gap in J.
struct FieldModelParams {
    double ej0{0.0};
    double b_delta{0.0};
    double b_phi0{0.0};
    double b_c{0.0};
    double gap_delta0{constants::aluminium_gap};
    double x_qp0{0.0};

    void validate() const;
};

/// Normalized sinc, sin(pi x) / (pi x).
double sinc_normalized(double x);

/// ej0 |sinc((B - B_delta) / B_phi0)|.
double fraunhofer_ej(const FieldModelParams& fm, double b);

/// ej0 sqrt(1 - B^2 / B_c^2), the gap-suppression form of E_J(B).
double ginzburg_landau_ej(const FieldModelParams& fm, double b);

/// gap_delta0 sqrt(1 - B^2 / B_c^2); |b| >= b_c throws.
double gap_at_field(const FieldModelParams& fm, double b);

struct FieldDependence {
    double e_j{0.0};         // Fraunhofer, Hz
    double e_j_gl{0.0};      // Ginzburg-Landau, Hz
    double gap{0.0};         // J
    double delta_x_qp{0.0};  // x_qp(gap(B), T) - x_qp(gap0, T)
};

FieldDependence field_dependence(const FieldModelParams& fm, double b, double t);

/// Junction length in m from the Fraunhofer period (G), the penetration
/// depth and the barrier thickness (m).
double junction_length(double b_phi0, double penetration_depth, double barrier_thickness);

}  // namespace fluxonium
