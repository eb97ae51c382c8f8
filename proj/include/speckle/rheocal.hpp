#pragma once

#include <array>
#include <utility>
#include <vector>

#include "speckle/errors.hpp"

namespace speckle::cal {

// Ostwald viscometer reading. Reference values are water at room
// temperature.
struct ViscometerReading {
    double density_g_ml = 0.0;
    double efflux_time_s = 0.0;
    double ref_density_g_ml = 0.997;
    double ref_time_s = 0.0;
    double ref_viscosity_cp = 0.8937;
};

// eta = (rho * t) / (rho_ref * t_ref) * eta_ref, in cP.
double ostwald_viscosity(const ViscometerReading& reading);

// Cubic map from speckle viscosity coefficient V to viscosity in cP.
struct CalibrationModel {
    std::array<double, 4> coeffs{}; // a3, a2, a1, a0
    double residual_norm = 0.0;
    int input_count = 0;
    double v_min = 0.0; // fitted V range, for extrapolation flagging
    double v_max = 0.0;
};

struct CalibratedViscosity {
    double viscosity_cp = 0.0;
    bool extrapolated = false; // V outside the fitted range
};

// Least-squares cubic through (V, ground-truth cP) points; normal
// equations with column scaling. Throws CalibrationError on fewer than 4
// points, duplicate V values, or rank deficiency.
CalibrationModel fit_calibration(const std::vector<std::pair<double, double>>& points);

// Horner evaluation of the cubic; flags V outside the fitted range.
CalibratedViscosity apply_calibration(const CalibrationModel& model, double v);

} // namespace speckle::cal
