#include "speckle/rheocal.hpp"

#include <algorithm>
#include <cmath>

namespace speckle::cal {

double ostwald_viscosity(const ViscometerReading& r) {
    if (!(r.density_g_ml > 0.0) || !(r.efflux_time_s > 0.0) ||
        !(r.ref_density_g_ml > 0.0) || !(r.ref_time_s > 0.0) || !(r.ref_viscosity_cp > 0.0)) {
        throw InvalidArgument("viscometer reading fields must all be positive");
    }
    return (r.density_g_ml * r.efflux_time_s) / (r.ref_density_g_ml * r.ref_time_s) * r.ref_viscosity_cp;
}

namespace {

// solve 4x4 via Gaussian elimination with partial pivoting
std::array<double, 4> solve4(std::array<std::array<double, 5>, 4> m) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        }
        if (std::abs(m[pivot][col]) < 1e-12) {
            throw CalibrationError("rank-deficient calibration system");
        }
        std::swap(m[col], m[pivot]);
        for (int row = col + 1; row < 4; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 5; ++k) m[row][k] -= f * m[col][k];
        }
    }
    std::array<double, 4> x{};
    for (int row = 3; row >= 0; --row) {
        double acc = m[row][4];
        for (int k = row + 1; k < 4; ++k) acc -= m[row][k] * x[k];
        x[row] = acc / m[row][row];
    }
    return x;
}

} // namespace

CalibrationModel fit_calibration(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) {
        throw CalibrationError("cubic calibration needs at least 4 points, got " +
                               std::to_string(points.size()));
    }
    std::vector<double> vs;
    for (const auto& [v, eta] : points) vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    for (std::size_t i = 1; i < vs.size(); ++i) {
        if (vs[i] == vs[i - 1]) throw CalibrationError("calibration V values must be distinct");
    }

    // column scaling keeps the normal equations well conditioned when V
    // spans a narrow range
    const double v_abs_max = std::max(std::abs(vs.front()), std::abs(vs.back()));
    const double s = v_abs_max > 0.0 ? v_abs_max : 1.0;

    // basis: (V/s)^3, (V/s)^2, (V/s), 1
    std::array<std::array<double, 5>, 4> m{};
    for (const auto& [v, eta] : points) {
        const double u = v / s;
        const std::array<double, 4> phi{u * u * u, u * u, u, 1.0};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) m[i][j] += phi[i] * phi[j];
            m[i][4] += phi[i] * eta;
        }
    }
    const std::array<double, 4> scaled = solve4(m);

    CalibrationModel model;
    model.coeffs = {scaled[0] / (s * s * s), scaled[1] / (s * s), scaled[2] / s, scaled[3]};
    model.input_count = static_cast<int>(points.size());
    model.v_min = vs.front();
    model.v_max = vs.back();
    double rss = 0.0;
    for (const auto& [v, eta] : points) {
        const double r = apply_calibration(model, v).viscosity_cp - eta;
        rss += r * r;
    }
    model.residual_norm = std::sqrt(rss);
    return model;
}

CalibratedViscosity apply_calibration(const CalibrationModel& model, double v) {
    const auto& a = model.coeffs;
    // Horner, fixed order
    const double eta = ((a[0] * v + a[1]) * v + a[2]) * v + a[3];
    return {eta, v < model.v_min || v > model.v_max};
}

} // namespace speckle::cal
