#pragma once

#include <Eigen/Dense>

#include "motkit/geometry.hpp"

namespace motkit {

/// 8-D box state: [xc, yc, w, h, vx, vy, vw, vh] in pixels and pixels/frame.
struct KalmanState {
    Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Zero();
};

/// Process/measurement noise scales with the current box height through these
/// weights (SORT-family convention).
struct KalmanConfig {
    double position_weight = 1.0 / 20.0;
    double velocity_weight = 1.0 / 160.0;
    double dt = 1.0;  // frames
};

/// Track state from a first measurement: zero velocities, covariance diagonal
/// scaled by the box height.
KalmanState kalman_initiate(const Box2D& measurement, const KalmanConfig& cfg);

/// Constant-velocity prediction: position += velocity*dt, covariance inflated
/// by height-scaled process noise.
KalmanState kalman_predict(const KalmanState& state, const KalmanConfig& cfg);

/// Platform-motion compensation: the transform's 2x2 linear part multiplies
/// each of the (x,y), (w,h), (vx,vy), (vw,vh) pairs of the mean and the
/// covariance from both sides; the translation shifts position only.
KalmanState apply_platform_compensation(const KalmanState& state, const AffineTransform2D& T);

/// Standard Kalman correction against the 4-D measurement [xc, yc, w, h]
/// (Joseph-form covariance update). Throws NumericalFailure when the
/// innovation solve goes non-finite.
KalmanState kalman_update(const KalmanState& state, const Box2D& measurement,
                          const KalmanConfig& cfg);

/// Extracts (xc, yc, w, h) into a top-left box; negative sizes clamp to 0.
Box2D state_to_box(const KalmanState& state);

}  // namespace motkit
