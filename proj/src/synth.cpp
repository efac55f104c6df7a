#include "shiptrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

#include "shiptrack/bbox.hpp"

namespace shiptrack {

namespace {

constexpr double kMinExtent = 2.0;       // clamped boxes keep at least this
constexpr double kHeadingNoiseStd = 0.02;  // radians per full-rate frame

// rng scheme "shiptrack-rng-v1": mt19937_64 seeded through splitmix64 per
// sub-stream, explicit Box-Muller normals and Knuth Poisson so draws do not
// depend on the standard library's distribution internals.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class SubStream {
 public:
  SubStream(std::uint64_t seed, std::uint64_t tag)
      : engine_(splitmix64(seed ^ splitmix64(tag))) {}

  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean, double std) {
    if (!spare_) {
      const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
      const double theta = 2.0 * std::numbers::pi * uniform();
      spare_ = r * std::sin(theta);
      return mean + std * r * std::cos(theta);
    }
    const double z = *spare_;
    spare_.reset();
    return mean + std * z;
  }

  int poisson(double lambda) {
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

enum : std::uint64_t {
  kTrajectoryTag = 0x7472616a, // "traj"
  kJitterTag = 0x6a697474,     // "jitt"
  kDetectionTag = 0x64657463,  // "detc"
  kClutterTag = 0x636c7574,    // "clut"
};

struct RawBox {
  double x, y, w, h;
};

// Clamp into the image keeping a minimum extent; the box may end up as a
// sliver on the border when the camera shake pushes it out.
BBox clamp_to_image(const RawBox& b, int width, int height) {
  const double x1 = std::clamp(b.x, 0.0, width - kMinExtent);
  const double x2 = std::clamp(b.x + b.w, x1 + kMinExtent, double(width));
  const double y1 = std::clamp(b.y, 0.0, height - kMinExtent);
  const double y2 = std::clamp(b.y + b.h, y1 + kMinExtent, double(height));
  return BBox(x1, y1, x2 - x1, y2 - y1);
}

void validate(const ScenarioConfig& c) {
  auto fail = [](const char* msg) { throw std::invalid_argument(std::string("scenario: ") + msg); };
  if (c.n_ships < 1) fail("n_ships must be >= 1");
  if (c.fps_subsample < 1) fail("fps_subsample must be >= 1");
  if (c.n_frames < 1 || (c.n_frames - 1) / c.fps_subsample + 1 < 2) {
    fail("fewer than 2 frames remain after subsampling");
  }
  if (c.image_width < 16 || c.image_height < 16) fail("image too small");
  if (!(c.jitter_std >= 0.0)) fail("jitter_std must be >= 0");
  if (!(c.detection_noise_std >= 0.0)) fail("detection_noise_std must be >= 0");
  if (!(c.miss_prob >= 0.0 && c.miss_prob < 1.0)) fail("miss_prob must lie in [0,1)");
  if (!(c.clutter_rate >= 0.0)) fail("clutter_rate must be >= 0");
  if (!(c.size_min >= kMinExtent) || c.size_min > c.size_max) fail("degenerate size range");
  if (!(c.speed_min >= 0.0) || c.speed_min > c.speed_max) fail("degenerate speed range");
  const auto& m = c.confidence;
  if (!(m.base >= 0.0 && m.base <= 1.0 && m.spread >= 0.0)) fail("bad confidence model");
  if (!(m.clutter_low >= 0.0 && m.clutter_low <= m.clutter_high && m.clutter_high <= 1.0)) {
    fail("bad clutter confidence range");
  }
}

}  // namespace

Scenario generate(const ScenarioConfig& cfg) {
  validate(cfg);

  const int kept_frames = (cfg.n_frames - 1) / cfg.fps_subsample + 1;
  const double width = cfg.image_width;
  const double height = cfg.image_height;

  // Ship trajectories at full rate, one ship at a time so the trajectory
  // stream is independent of every noise knob.
  SubStream traj(cfg.seed, kTrajectoryTag);
  struct ShipFrame {
    RawBox box;
    bool alive;
  };
  std::vector<std::vector<ShipFrame>> ships(cfg.n_ships);
  std::vector<int> ship_class(cfg.n_ships);

  for (int s = 0; s < cfg.n_ships; ++s) {
    ship_class[s] = 1 + static_cast<int>(traj.uniform() * 7.0);
    const double w = traj.uniform(cfg.size_min, cfg.size_max);
    const double h = traj.uniform(cfg.size_min, cfg.size_max);
    double cx = traj.uniform(0.1 * width, 0.9 * width);
    double cy = traj.uniform(0.1 * height, 0.9 * height);
    const double speed = traj.uniform(cfg.speed_min, cfg.speed_max);
    double heading = traj.uniform(0.0, 2.0 * std::numbers::pi);

    auto& frames = ships[s];
    frames.resize(cfg.n_frames);
    bool alive = true;
    for (int f = 0; f < cfg.n_frames; ++f) {
      heading += traj.normal(0.0, kHeadingNoiseStd);
      if (f > 0) {
        cx += speed * std::cos(heading);
        cy += speed * std::sin(heading);
      }
      // A ship whose base box fully leaves the image is gone for good.
      if (cx + 0.5 * w < 0.0 || cx - 0.5 * w > width || cy + 0.5 * h < 0.0 ||
          cy - 0.5 * h > height) {
        alive = false;
      }
      frames[f] = ShipFrame{RawBox{cx - 0.5 * w, cy - 0.5 * h, w, h}, alive};
    }
  }

  // Shared per-kept-frame camera offset. The unit draws are scaled by
  // jitter_std so a jitter sweep with one seed moves the same shake pattern.
  SubStream jitter(cfg.seed, kJitterTag);
  std::vector<std::pair<double, double>> offsets(kept_frames);
  for (auto& o : offsets) {
    o.first = jitter.normal(0.0, 1.0) * cfg.jitter_std;
    o.second = jitter.normal(0.0, 1.0) * cfg.jitter_std;
  }

  Scenario out;
  out.config_echo = cfg;
  out.detections.resize(kept_frames);

  std::vector<std::vector<RawBox>> gt_raw(kept_frames);  // jittered, pre-clamp, per ship order
  std::vector<std::vector<int>> gt_ship(kept_frames);

  for (int kf = 0; kf < kept_frames; ++kf) {
    const int f = kf * cfg.fps_subsample;
    for (int s = 0; s < cfg.n_ships; ++s) {
      const ShipFrame& sf = ships[s][f];
      if (!sf.alive) continue;
      RawBox b = sf.box;
      b.x += offsets[kf].first;
      b.y += offsets[kf].second;
      gt_raw[kf].push_back(b);
      gt_ship[kf].push_back(s);
      out.gt.push_back(GtEntry{
          .frame = kf + 1,
          .object_id = s + 1,
          .bbox = clamp_to_image(b, cfg.image_width, cfg.image_height),
          .visibility = 1.0,
          .class_id = ship_class[s],
          .considered = true,
      });
    }
  }

  SubStream det(cfg.seed, kDetectionTag);
  for (int kf = 0; kf < kept_frames; ++kf) {
    for (size_t i = 0; i < gt_raw[kf].size(); ++i) {
      if (det.uniform() < cfg.miss_prob) continue;
      RawBox b = gt_raw[kf][i];
      b.x += det.normal(0.0, cfg.detection_noise_std);
      b.y += det.normal(0.0, cfg.detection_noise_std);
      // log-size noise sized so one sigma moves an edge by about
      // detection_noise_std pixels
      b.w *= std::exp(det.normal(0.0, cfg.detection_noise_std / b.w));
      b.h *= std::exp(det.normal(0.0, cfg.detection_noise_std / b.h));
      const double conf =
          std::clamp(cfg.confidence.base + cfg.confidence.spread * det.normal(0.0, 1.0), 0.0, 1.0);
      out.detections[kf].push_back(Detection{
          .bbox = clamp_to_image(b, cfg.image_width, cfg.image_height),
          .confidence = conf,
          .class_id = ship_class[gt_ship[kf][i]],
      });
    }
  }

  SubStream clutter(cfg.seed, kClutterTag);
  for (int kf = 0; kf < kept_frames; ++kf) {
    const int n = clutter.poisson(cfg.clutter_rate);
    for (int c = 0; c < n; ++c) {
      const double w = clutter.uniform(cfg.size_min, cfg.size_max);
      const double h = clutter.uniform(cfg.size_min, cfg.size_max);
      const double x = clutter.uniform(0.0, width - w);
      const double y = clutter.uniform(0.0, height - h);
      const double conf = clutter.uniform(cfg.confidence.clutter_low, cfg.confidence.clutter_high);
      out.detections[kf].push_back(Detection{
          .bbox = clamp_to_image(RawBox{x, y, w, h}, cfg.image_width, cfg.image_height),
          .confidence = conf,
          .class_id = 0,
      });
    }
  }

  return out;
}

RegimeStats regime_stats(const Scenario& s) {
  // gt is sorted by (frame, object_id); regroup per object.
  std::map<int, std::vector<const GtEntry*>> per_object;
  for (const auto& e : s.gt) per_object[e.object_id].push_back(&e);

  std::vector<double> ious;
  double tiou_sum = 0.0;
  for (const auto& [id, entries] : per_object) {
    for (size_t i = 0; i + 1 < entries.size(); ++i) {
      if (entries[i + 1]->frame != entries[i]->frame + 1) continue;
      ious.push_back(iou(entries[i]->bbox, entries[i + 1]->bbox));
      tiou_sum += tiou(entries[i]->bbox, entries[i + 1]->bbox);
    }
  }

  RegimeStats stats;
  stats.pair_count = ious.size();
  if (ious.empty()) return stats;

  std::vector<double> sorted = ious;
  std::sort(sorted.begin(), sorted.end());
  const size_t mid = sorted.size() / 2;
  stats.median_iou =
      sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  stats.zero_iou_fraction =
      double(std::count(ious.begin(), ious.end(), 0.0)) / double(ious.size());
  stats.mean_tiou = tiou_sum / double(ious.size());
  return stats;
}

}  // namespace shiptrack
