#include <stdexcept>
#include <map>

#include <doctest.h>

#include "shiptrack/bbox.hpp"
#include "shiptrack/synth.hpp"

using namespace shiptrack;

namespace {

bool scenarios_equal(const Scenario& a, const Scenario& b) {
  if (a.gt.size() != b.gt.size()) return false;
  for (size_t i = 0; i < a.gt.size(); ++i) {
    const auto& x = a.gt[i];
    const auto& y = b.gt[i];
    if (x.frame != y.frame || x.object_id != y.object_id || !(x.bbox == y.bbox) ||
        x.class_id != y.class_id) {
      return false;
    }
  }
  if (a.detections.size() != b.detections.size()) return false;
  for (size_t f = 0; f < a.detections.size(); ++f) {
    if (a.detections[f].size() != b.detections[f].size()) return false;
    for (size_t d = 0; d < a.detections[f].size(); ++d) {
      const auto& x = a.detections[f][d];
      const auto& y = b.detections[f][d];
      if (!(x.bbox == y.bbox) || x.confidence != y.confidence || x.class_id != y.class_id) {
        return false;
      }
    }
  }
  return true;
}

ScenarioConfig clean_config() {
  ScenarioConfig cfg;
  cfg.n_ships = 6;
  cfg.n_frames = 80;
  cfg.seed = 21;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  ScenarioConfig cfg = clean_config();
  cfg.miss_prob = 1.0;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);

  cfg = clean_config();
  cfg.n_frames = 3;
  cfg.fps_subsample = 4;  // single kept frame
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);

  cfg = clean_config();
  cfg.size_min = 50;
  cfg.size_max = 20;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);

  cfg = clean_config();
  cfg.jitter_std = -1.0;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}

TEST_CASE("fixed seed reproduces the scenario exactly") {
  ScenarioConfig cfg = clean_config();
  cfg.jitter_std = 30.0;
  cfg.detection_noise_std = 2.0;
  cfg.miss_prob = 0.1;
  cfg.clutter_rate = 1.0;
  CHECK(scenarios_equal(generate(cfg), generate(cfg)));

  ScenarioConfig other = cfg;
  other.seed = cfg.seed + 1;
  CHECK_FALSE(scenarios_equal(generate(cfg), generate(other)));
}

TEST_CASE("noise knobs leave the trajectories untouched") {
  ScenarioConfig quiet = clean_config();
  ScenarioConfig noisy = quiet;
  noisy.detection_noise_std = 5.0;
  noisy.miss_prob = 0.3;
  noisy.clutter_rate = 2.0;

  const auto a = generate(quiet);
  const auto b = generate(noisy);
  REQUIRE(a.gt.size() == b.gt.size());
  for (size_t i = 0; i < a.gt.size(); ++i) {
    CHECK(a.gt[i].bbox == b.gt[i].bbox);
  }
}

TEST_CASE("noise-free scenario: detections equal ground truth") {
  ScenarioConfig cfg = clean_config();
  const auto s = generate(cfg);

  std::map<int, std::vector<const GtEntry*>> by_frame;
  for (const auto& e : s.gt) by_frame[e.frame].push_back(&e);

  for (size_t f = 0; f < s.detections.size(); ++f) {
    const auto& gts = by_frame[static_cast<int>(f) + 1];
    REQUIRE(s.detections[f].size() == gts.size());
    for (size_t d = 0; d < s.detections[f].size(); ++d) {
      CHECK(s.detections[f][d].bbox == gts[d]->bbox);
    }
  }

  const auto stats = regime_stats(s);
  CHECK(stats.pair_count > 100);
  CHECK(stats.median_iou >= 0.5);  // slow ships against big boxes
}

TEST_CASE("heavy jitter at low frame rate destroys consecutive overlap") {
  ScenarioConfig cfg = clean_config();
  cfg.n_ships = 20;
  cfg.n_frames = 400;
  cfg.fps_subsample = 4;
  cfg.speed_min = 0.5;  // slow enough that most ships stay in view
  cfg.speed_max = 1.5;
  cfg.jitter_std = 200.0;  // twice the median box width
  const auto s = generate(cfg);
  const auto stats = regime_stats(s);
  CHECK(stats.pair_count >= 1000);
  CHECK(stats.zero_iou_fraction > 0.5);
  CHECK(stats.mean_tiou > 0.0);
}

TEST_CASE("zero-IoU fraction does not decrease along a jitter sweep") {
  ScenarioConfig cfg = clean_config();
  cfg.n_ships = 10;
  cfg.n_frames = 300;
  double prev = -1.0;
  for (const double jitter : {0.0, 50.0, 100.0, 200.0}) {
    cfg.jitter_std = jitter;
    const auto stats = regime_stats(generate(cfg));
    CHECK(stats.zero_iou_fraction >= prev);
    prev = stats.zero_iou_fraction;
  }
}

TEST_CASE("all emitted boxes stay inside the image") {
  ScenarioConfig cfg = clean_config();
  cfg.jitter_std = 400.0;
  cfg.detection_noise_std = 10.0;
  cfg.clutter_rate = 2.0;
  const auto s = generate(cfg);
  auto check_box = [&](const BBox& b) {
    CHECK(b.left() >= 0.0);
    CHECK(b.top() >= 0.0);
    CHECK(b.right() <= cfg.image_width);
    CHECK(b.bottom() <= cfg.image_height);
    CHECK(b.w() >= 2.0);
    CHECK(b.h() >= 2.0);
  };
  for (const auto& e : s.gt) check_box(e.bbox);
  for (const auto& frame : s.detections) {
    for (const auto& d : frame) check_box(d.bbox);
  }
}

TEST_CASE("regime stats on constructed scenarios") {
  // static single ship
  Scenario s;
  for (int f = 1; f <= 5; ++f) {
    s.gt.push_back(GtEntry{f, 1, BBox(10, 10, 20, 20), 1.0, 1, true});
  }
  auto stats = regime_stats(s);
  CHECK(stats.median_iou == doctest::Approx(1.0));
  CHECK(stats.zero_iou_fraction == 0.0);
  CHECK(stats.mean_tiou == doctest::Approx(1.0));

  // disjoint hops: IoU collapses, TIoU does not
  Scenario hops;
  for (int f = 1; f <= 4; ++f) {
    hops.gt.push_back(GtEntry{f, 1, BBox(30.0 * f, 10, 20, 20), 1.0, 1, true});
  }
  stats = regime_stats(hops);
  CHECK(stats.zero_iou_fraction == 1.0);
  CHECK(stats.mean_tiou > 0.0);
}
