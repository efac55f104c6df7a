#pragma once

#include <Eigen/Dense>

#include "shiptrack/bbox.hpp"

namespace shiptrack {

/// Process/measurement noise scales relative to box height.
struct NoiseConfig {
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
};

/// Constant-velocity state of one tracked box: mean is
/// (cx, cy, aspect, height) plus their per-frame velocities.
struct KalmanTrackState {
  Eigen::Matrix<double, 8, 1> mean;
  Eigen::Matrix<double, 8, 8> covariance;
};

/// New state centered on the detection, zero velocity, diagonal covariance
/// scaled by the detection height.
KalmanTrackState initiate(const BBox& det, const NoiseConfig& cfg);

/// Advances the state one frame and inflates covariance with process noise.
KalmanTrackState predict(const KalmanTrackState& s, const NoiseConfig& cfg);

/// Standard correction against the (cx, cy, aspect, height) measurement
/// taken from the detection box. Throws std::runtime_error if the innovation
/// covariance cannot be factorized.
KalmanTrackState update(const KalmanTrackState& s, const BBox& det, const NoiseConfig& cfg);

/// Converts the positional part of the mean back to a box.
/// Throws std::runtime_error when height or aspect is non-positive.
BBox to_bbox(const KalmanTrackState& s);

}  // namespace shiptrack
