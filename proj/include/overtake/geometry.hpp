#pragma once

#include <vector>

namespace overtake {

// Forward-facing monocular camera under the flat-ground assumption.
struct CameraModel {
    double c_px = 0.0;    // focal constant, pixels
    double y1_m = 0.0;    // mounting height above ground, meters
    double y_g_px = 0.0;  // horizon row, pixels

    void validate() const;  // c_px > 0, y1_m > 0, all finite
};

// Pixel-space observation of one target's ground contact point.
struct ImageObservation {
    double y_f_px = 0.0;       // row of the ground contact
    double x_offset_px = 0.0;  // signed column offset from image center
    double t_s = 0.0;

    void validate() const;  // finite pixels
};

// One calibration session: a target at a known distance observed p times.
struct CalibrationSession {
    double target_m = 0.0;  // measured ground-truth distance, > 0
    std::vector<ImageObservation> observations;
};

struct CalibrationSet {
    std::vector<CalibrationSession> sessions;
    void validate() const;  // targets > 0, every session non-empty
};

// Ground distance from the pinhole relation Z = c * y1 / (y_f - y_g).
// The target must sit below the horizon row.
double longitudinal_distance(const CameraModel& camera, const ImageObservation& obs);

// Lateral separation of two targets sharing depth Z: |dx| * Z / c.
double mutual_lateral_distance(const CameraModel& camera, const ImageObservation& a,
                               const ImageObservation& b, double z_m);

// Inverse projection: where a ground point at depth Z and lateral offset
// appears in the image. longitudinal_distance(project_to_image(Z)) == Z.
ImageObservation project_to_image(const CameraModel& camera, double z_m, double lateral_m,
                                  double t_s = 0.0);

// Speed of an adjacent vehicle from ego speed plus gap differencing:
//   B = (ego_prev + ego_now)/2 + (gap_now - gap_prev)/dt.
// Exact for constant-acceleration motion sampled exactly. Gaps to vehicles
// ahead are positive scalars along the road axis; a closing gap contributes
// negatively. Oncoming speeds come out in the oncoming frame, so closing
// speed is ego + result.
double adjacent_vehicle_speed(double ego_speed_prev_mps, double ego_speed_now_mps,
                              double gap_prev_m, double gap_now_m, double dt_s);

// Mean absolute percentage error over calibration sessions: the mean over
// repetitions within a session, then the mean over sessions, in percent.
// calculated[j][c] is the c-th computed distance for session j, measured[j]
// the session's ground truth.
double mape(const std::vector<std::vector<double>>& calculated, const std::vector<double>& measured);

}  // namespace overtake
