#include "shiptrack/kalman.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

namespace shiptrack {

namespace {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

// Minimum std for the aspect-ratio channel; it carries no pixel scale.
constexpr double kAspectPosStd = 1e-2;
constexpr double kAspectVelStd = 1e-5;
constexpr double kAspectMeasStd = 1e-1;

Vec4 measurement_of(const BBox& det) {
  Vec4 z;
  z << det.center_x(), det.center_y(), det.aspect(), det.h();
  return z;
}

Mat8 transition_matrix() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

Mat48 observation_matrix() {
  Mat48 h = Mat48::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

}  // namespace

KalmanTrackState initiate(const BBox& det, const NoiseConfig& cfg) {
  KalmanTrackState s;
  s.mean.setZero();
  s.mean.head<4>() = measurement_of(det);

  const double h = det.h();
  Vec8 std;
  std << 2.0 * cfg.std_weight_position * h, 2.0 * cfg.std_weight_position * h, kAspectPosStd,
      2.0 * cfg.std_weight_position * h, 10.0 * cfg.std_weight_velocity * h,
      10.0 * cfg.std_weight_velocity * h, kAspectVelStd, 10.0 * cfg.std_weight_velocity * h;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

KalmanTrackState predict(const KalmanTrackState& s, const NoiseConfig& cfg) {
  const double h = s.mean(3);
  Vec8 std;
  std << cfg.std_weight_position * h, cfg.std_weight_position * h, kAspectPosStd,
      cfg.std_weight_position * h, cfg.std_weight_velocity * h, cfg.std_weight_velocity * h,
      kAspectVelStd, cfg.std_weight_velocity * h;
  const Mat8 process_noise = std.array().square().matrix().asDiagonal();

  const Mat8 f = transition_matrix();
  KalmanTrackState out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose() + process_noise;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

KalmanTrackState update(const KalmanTrackState& s, const BBox& det, const NoiseConfig& cfg) {
  const double h = s.mean(3);
  Vec4 std;
  std << cfg.std_weight_position * h, cfg.std_weight_position * h, kAspectMeasStd,
      cfg.std_weight_position * h;
  const Mat4 measurement_noise = std.array().square().matrix().asDiagonal();

  const Mat48 obs = observation_matrix();
  const Mat4 innovation_cov = obs * s.covariance * obs.transpose() + measurement_noise;

  Eigen::LLT<Mat4> llt(innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("kalman update: innovation covariance is not positive definite");
  }
  // gain = P H^T S^-1, solved without forming the inverse.
  const Eigen::Matrix<double, 8, 4> gain =
      llt.solve(obs * s.covariance.transpose()).transpose();

  const Vec4 innovation = measurement_of(det) - obs * s.mean;

  KalmanTrackState out;
  out.mean = s.mean + gain * innovation;
  // Joseph form keeps the covariance symmetric PSD under roundoff.
  const Mat8 a = Mat8::Identity() - gain * obs;
  out.covariance = a * s.covariance * a.transpose() + gain * measurement_noise * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

BBox to_bbox(const KalmanTrackState& s) {
  const double cx = s.mean(0);
  const double cy = s.mean(1);
  const double a = s.mean(2);
  const double h = s.mean(3);
  if (!(h > 0.0) || !(a > 0.0)) {
    throw std::runtime_error("kalman state has non-positive height or aspect");
  }
  const double w = a * h;
  return BBox(cx - 0.5 * w, cy - 0.5 * h, w, h);
}

}  // namespace shiptrack
