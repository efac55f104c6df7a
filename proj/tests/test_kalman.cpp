#include <stdexcept>
#include <cmath>
#include <random>

#include <doctest.h>
#include <Eigen/Eigenvalues>

#include "shiptrack/kalman.hpp"
#include "test_util.hpp"

using namespace shiptrack;
using shiptrack::testing::random_box;

namespace {

const NoiseConfig kNoise{};

bool covariance_ok(const KalmanTrackState& s, double eig_floor = -1e-9) {
  const Eigen::Matrix<double, 8, 8> diff = s.covariance - s.covariance.transpose();
  if (diff.cwiseAbs().maxCoeff() > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> eig(s.covariance);
  return eig.eigenvalues().minCoeff() >= eig_floor;
}

}  // namespace

TEST_CASE("initiate converts the box and zeroes velocities") {
  const auto s = initiate(BBox(0, 0, 2, 4), kNoise);
  CHECK(s.mean(0) == doctest::Approx(1.0));
  CHECK(s.mean(1) == doctest::Approx(2.0));
  CHECK(s.mean(2) == doctest::Approx(0.5));
  CHECK(s.mean(3) == doctest::Approx(4.0));
  for (int i = 4; i < 8; ++i) CHECK(s.mean(i) == 0.0);
  CHECK(covariance_ok(s));
}

TEST_CASE("initiate/to_bbox round trip") {
  const BBox det(10, 10, 5, 5);
  const BBox back = to_bbox(initiate(det, kNoise));
  CHECK(back.x() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(back.y() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(back.w() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(back.h() == doctest::Approx(5.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const BBox b = random_box(rng);
    const BBox r = to_bbox(initiate(b, kNoise));
    CHECK(std::abs(r.x() - b.x()) < 1e-9);
    CHECK(std::abs(r.y() - b.y()) < 1e-9);
    CHECK(std::abs(r.w() - b.w()) < 1e-9);
    CHECK(std::abs(r.h() - b.h()) < 1e-9);
  }
}

TEST_CASE("to_bbox direct conversions") {
  KalmanTrackState s = initiate(BBox(0, 0, 1, 1), kNoise);
  s.mean.head<4>() << 5.0, 5.0, 1.0, 2.0;
  const BBox b = to_bbox(s);
  CHECK(b.x() == doctest::Approx(4.0));
  CHECK(b.y() == doctest::Approx(4.0));
  CHECK(b.w() == doctest::Approx(2.0));
  CHECK(b.h() == doctest::Approx(2.0));

  s.mean(3) = -1.0;
  CHECK_THROWS_AS(to_bbox(s), std::runtime_error);
}

TEST_CASE("predict applies constant velocity and inflates covariance") {
  auto s = initiate(BBox(5, 5, 10, 10), kNoise);

  const auto still = predict(s, kNoise);
  CHECK(still.mean(0) == doctest::Approx(s.mean(0)));
  CHECK(still.mean(1) == doctest::Approx(s.mean(1)));
  CHECK(still.covariance.trace() > s.covariance.trace());

  s.mean(0) = 10.0;
  s.mean(4) = 3.0;  // cx velocity
  const auto moved = predict(s, kNoise);
  CHECK(moved.mean(0) == doctest::Approx(13.0));
  CHECK(covariance_ok(moved));
}

TEST_CASE("update with the predicted measurement is a no-op on the mean") {
  auto s = initiate(BBox(12, 30, 8, 16), kNoise);
  s.mean(4) = 1.5;
  s.mean(5) = -0.5;
  const auto pred = predict(s, kNoise);
  const auto upd = update(pred, to_bbox(pred), kNoise);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(upd.mean(i) - pred.mean(i)) < 1e-9);
  CHECK(upd.covariance.trace() < pred.covariance.trace());
}

TEST_CASE("repeated predict/update against a fixed detection converges") {
  // box-scale hop; the velocity channel's slow pole dominates the decay
  const BBox target(5, 3, 10, 10);
  auto s = initiate(BBox(0, 0, 10, 10), kNoise);
  for (int i = 0; i < 50; ++i) {
    s = update(predict(s, kNoise), target, kNoise);
  }
  const BBox b = to_bbox(s);
  CHECK(std::abs(b.x() - target.x()) < 1e-3);
  CHECK(std::abs(b.y() - target.y()) < 1e-3);
  CHECK(std::abs(b.w() - target.w()) < 1e-3);
  CHECK(std::abs(b.h() - target.h()) < 1e-3);
}

TEST_CASE("posterior lands between prior and measurement componentwise") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = predict(initiate(random_box(rng), kNoise), kNoise);
    const BBox det = random_box(rng);
    const auto upd = update(s, det, kNoise);
    const double meas[4] = {det.center_x(), det.center_y(), det.aspect(), det.h()};
    for (int i = 0; i < 4; ++i) {
      const double lo = std::min(s.mean(i), meas[i]) - 1e-9;
      const double hi = std::max(s.mean(i), meas[i]) + 1e-9;
      CHECK(upd.mean(i) >= lo);
      CHECK(upd.mean(i) <= hi);
    }
  }
}

TEST_CASE("covariance stays symmetric PSD across random interleavings") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  for (int trial = 0; trial < 50; ++trial) {
    auto s = initiate(random_box(rng), kNoise);
    for (int step = 0; step < 60; ++step) {
      if (coin(rng) < 0.5) {
        s = predict(s, kNoise);
      } else {
        s = update(s, random_box(rng), kNoise);
      }
      CHECK(covariance_ok(s, -1e-6));
    }
  }
}
