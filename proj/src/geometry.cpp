#include "overtake/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace overtake {

namespace {
void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}
}  // namespace

void CameraModel::validate() const {
    require_finite(c_px, "camera constant");
    require_finite(y1_m, "camera height");
    require_finite(y_g_px, "horizon row");
    if (c_px <= 0.0) throw std::invalid_argument("camera constant must be > 0 px");
    if (y1_m <= 0.0) throw std::invalid_argument("camera height must be > 0 m");
}

void ImageObservation::validate() const {
    require_finite(y_f_px, "y_f");
    require_finite(x_offset_px, "x_offset");
    require_finite(t_s, "observation time");
}

void CalibrationSet::validate() const {
    if (sessions.empty()) throw std::invalid_argument("calibration set has no sessions");
    for (std::size_t j = 0; j < sessions.size(); ++j) {
        if (!(sessions[j].target_m > 0.0) || !std::isfinite(sessions[j].target_m)) {
            throw std::invalid_argument("calibration session " + std::to_string(j) +
                                        " has non-positive target distance");
        }
        if (sessions[j].observations.empty()) {
            throw std::invalid_argument("calibration session " + std::to_string(j) +
                                        " has no observations");
        }
        for (const auto& obs : sessions[j].observations) obs.validate();
    }
}

double longitudinal_distance(const CameraModel& camera, const ImageObservation& obs) {
    camera.validate();
    obs.validate();
    const double drop = obs.y_f_px - camera.y_g_px;
    if (drop <= 0.0) {
        throw std::invalid_argument("target at or above the horizon row (y_f - y_g = " +
                                    std::to_string(drop) + " px): distance unbounded");
    }
    return camera.c_px * camera.y1_m / drop;
}

double mutual_lateral_distance(const CameraModel& camera, const ImageObservation& a,
                               const ImageObservation& b, double z_m) {
    camera.validate();
    a.validate();
    b.validate();
    if (!(z_m > 0.0) || !std::isfinite(z_m)) {
        throw std::invalid_argument("common depth must be > 0 m, got " + std::to_string(z_m));
    }
    return std::abs(a.x_offset_px - b.x_offset_px) * z_m / camera.c_px;
}

ImageObservation project_to_image(const CameraModel& camera, double z_m, double lateral_m,
                                  double t_s) {
    camera.validate();
    if (!(z_m > 0.0) || !std::isfinite(z_m)) {
        throw std::invalid_argument("projection depth must be > 0 m, got " + std::to_string(z_m));
    }
    require_finite(lateral_m, "lateral offset");
    ImageObservation obs;
    obs.y_f_px = camera.y_g_px + camera.c_px * camera.y1_m / z_m;
    obs.x_offset_px = camera.c_px * lateral_m / z_m;
    obs.t_s = t_s;
    return obs;
}

double adjacent_vehicle_speed(double ego_speed_prev_mps, double ego_speed_now_mps,
                              double gap_prev_m, double gap_now_m, double dt_s) {
    require_finite(ego_speed_prev_mps, "ego speed");
    require_finite(ego_speed_now_mps, "ego speed");
    require_finite(gap_prev_m, "gap");
    require_finite(gap_now_m, "gap");
    if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
        throw std::invalid_argument("dt must be > 0 s, got " + std::to_string(dt_s));
    }
    return 0.5 * (ego_speed_prev_mps + ego_speed_now_mps) + (gap_now_m - gap_prev_m) / dt_s;
}

double mape(const std::vector<std::vector<double>>& calculated,
            const std::vector<double>& measured) {
    if (calculated.size() != measured.size()) {
        throw std::invalid_argument("shape mismatch: " + std::to_string(calculated.size()) +
                                    " calculated sessions vs " + std::to_string(measured.size()) +
                                    " measured targets");
    }
    if (calculated.empty()) throw std::invalid_argument("mape needs at least one session");
    double session_sum = 0.0;
    for (std::size_t j = 0; j < calculated.size(); ++j) {
        if (!(measured[j] > 0.0) || !std::isfinite(measured[j])) {
            throw std::invalid_argument("measured distance for session " + std::to_string(j) +
                                        " must be > 0, got " + std::to_string(measured[j]));
        }
        const auto& reps = calculated[j];
        if (reps.empty()) {
            throw std::invalid_argument("session " + std::to_string(j) + " has no repetitions");
        }
        double rep_sum = 0.0;
        for (double z_calc : reps) {
            require_finite(z_calc, "calculated distance");
            rep_sum += std::abs(z_calc - measured[j]) / measured[j];
        }
        session_sum += 100.0 / static_cast<double>(reps.size()) * rep_sum;
    }
    return session_sum / static_cast<double>(calculated.size());
}

}  // namespace overtake
