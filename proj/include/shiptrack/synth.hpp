#pragma once

#include <cstdint>
#include <vector>

#include "shiptrack/clear_metrics.hpp"
#include "shiptrack/tracker.hpp"

namespace shiptrack {

/// Maps detection quality to confidence scores: true detections draw
/// around `base`, clutter draws uniformly from [clutter_low, clutter_high].
struct ConfidenceModel {
  double base = 0.9;
  double spread = 0.03;
  double clutter_low = 0.1;
  double clutter_high = 0.55;
};

/// Seeded maritime scenario: ships on near-constant-velocity courses, a
/// shared per-frame camera jitter (wave shake), frame-rate subsampling,
/// per-box detection noise, misses, and clutter.
struct ScenarioConfig {
  int n_ships = 10;
  int n_frames = 200;  // full-rate frames before subsampling
  int image_width = 1920;
  int image_height = 1080;
  int fps_subsample = 1;  // keep every k-th frame
  double jitter_std = 0.0;
  double detection_noise_std = 0.0;
  double miss_prob = 0.0;
  double clutter_rate = 0.0;  // expected false positives per kept frame
  ConfidenceModel confidence;
  double size_min = 60.0;
  double size_max = 140.0;
  double speed_min = 1.0;  // pixels per full-rate frame
  double speed_max = 4.0;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::vector<GtEntry> gt;  // sorted by (frame, object_id); frames renumbered from 1
  std::vector<std::vector<Detection>> detections;  // index = kept frame - 1
  ScenarioConfig config_echo;
};

/// Deterministic: identical config (seed included) gives an identical
/// scenario. Trajectories, jitter, detection noise and clutter draw from
/// separate sub-streams, so changing one knob leaves the others' draws
/// untouched. Throws std::invalid_argument on config violations.
Scenario generate(const ScenarioConfig& cfg);

/// Statistics over each object's consecutive-kept-frame gt box pairs.
struct RegimeStats {
  double median_iou = 0.0;
  double zero_iou_fraction = 0.0;
  double mean_tiou = 0.0;
  std::size_t pair_count = 0;
};

RegimeStats regime_stats(const Scenario& s);

}  // namespace shiptrack
