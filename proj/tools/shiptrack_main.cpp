#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shiptrack/clear_metrics.hpp"
#include "shiptrack/mot_io.hpp"
#include "shiptrack/synth.hpp"
#include "shiptrack/tracker.hpp"
#include "shiptrack/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shiptrack;

namespace {

bool verbose() {
  const char* v = std::getenv("SHIPTRACK_VERBOSE");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

std::string fnv1a_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + hex;
}

json manifest_skeleton(const std::string& command) {
  return json{{"tool", kToolName}, {"version", kToolVersion}, {"command", command}};
}

void write_manifest(const fs::path& path, const json& manifest) {
  std::ofstream out(path);
  out << manifest.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
}

// ---- config <-> json ----

json tracker_to_json(const TrackerConfig& c) {
  json j{{"pipeline", c.pipeline == Pipeline::Sort ? "sort" : "byte"},
         {"metric", metric_name(c.metric)},
         {"gate", c.gate},
         {"high_conf_threshold", c.high_conf_threshold},
         {"low_conf_floor", c.low_conf_floor},
         {"max_age", c.max_age},
         {"min_hits", c.min_hits},
         {"gating", c.gating == GatingMode::PostSolve ? "post" : "premask"},
         {"coast_output", c.emit_coasting},
         {"output_box", c.output_box == OutputBoxPolicy::Detection ? "detection" : "posterior"},
         {"noise",
          {{"std_weight_position", c.noise.std_weight_position},
           {"std_weight_velocity", c.noise.std_weight_velocity}}}};
  if (c.stage_two_gate) j["stage_two_gate"] = *c.stage_two_gate;
  return j;
}

json scenario_to_json(const ScenarioConfig& c) {
  return json{{"n_ships", c.n_ships},
              {"n_frames", c.n_frames},
              {"image_width", c.image_width},
              {"image_height", c.image_height},
              {"fps_subsample", c.fps_subsample},
              {"jitter_std", c.jitter_std},
              {"detection_noise_std", c.detection_noise_std},
              {"miss_prob", c.miss_prob},
              {"clutter_rate", c.clutter_rate},
              {"size_min", c.size_min},
              {"size_max", c.size_max},
              {"speed_min", c.speed_min},
              {"speed_max", c.speed_max},
              {"seed", c.seed},
              {"confidence",
               {{"base", c.confidence.base},
                {"spread", c.confidence.spread},
                {"clutter_low", c.confidence.clutter_low},
                {"clutter_high", c.confidence.clutter_high}}}};
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  c.n_ships = j.value("n_ships", c.n_ships);
  c.n_frames = j.value("n_frames", c.n_frames);
  c.image_width = j.value("image_width", c.image_width);
  c.image_height = j.value("image_height", c.image_height);
  c.fps_subsample = j.value("fps_subsample", c.fps_subsample);
  c.jitter_std = j.value("jitter_std", c.jitter_std);
  c.detection_noise_std = j.value("detection_noise_std", c.detection_noise_std);
  c.miss_prob = j.value("miss_prob", c.miss_prob);
  c.clutter_rate = j.value("clutter_rate", c.clutter_rate);
  c.size_min = j.value("size_min", c.size_min);
  c.size_max = j.value("size_max", c.size_max);
  c.speed_min = j.value("speed_min", c.speed_min);
  c.speed_max = j.value("speed_max", c.speed_max);
  c.seed = j.value("seed", c.seed);
  if (j.contains("confidence")) {
    const json& m = j["confidence"];
    c.confidence.base = m.value("base", c.confidence.base);
    c.confidence.spread = m.value("spread", c.confidence.spread);
    c.confidence.clutter_low = m.value("clutter_low", c.confidence.clutter_low);
    c.confidence.clutter_high = m.value("clutter_high", c.confidence.clutter_high);
  }
  return c;
}

json report_to_json(const MetricsReport& r) {
  return json{{"MOTA", r.mota}, {"MOTP", r.motp}, {"IDF1", r.idf1},
              {"Recall", r.recall}, {"FP", r.fp},  {"FN", r.fn},
              {"IDS", r.ids},   {"FM", r.fm},   {"MT", r.mt},
              {"ML", r.ml},     {"GT", r.gt_count}};
}

// ---- tracking driver shared by track/ablate ----

std::vector<FrameResult> run_tracker(const TrackerConfig& cfg,
                                     const std::map<int, std::vector<Detection>>& per_frame,
                                     int max_frame) {
  Tracker tracker(cfg);
  std::vector<FrameResult> results;
  static const std::vector<Detection> none;
  for (int frame = 1; frame <= max_frame; ++frame) {
    const auto it = per_frame.find(frame);
    results.push_back(tracker.step(frame, it == per_frame.end() ? none : it->second));
  }
  return results;
}

std::vector<ResultRecord> to_result_records(const std::vector<FrameResult>& results) {
  std::vector<ResultRecord> records;
  for (const auto& fr : results) {
    for (const auto& o : fr.outputs) {
      records.push_back(ResultRecord{fr.frame_index, o.track_id, o.bbox, o.confidence});
    }
  }
  return records;
}

// ---- subcommand state ----

struct TrackerFlags {
  std::string pipeline = "sort";
  std::string metric = "iou";
  double gate = 0.1;
  double high_conf = 0.6;
  double low_conf = 0.1;
  int max_age = 30;
  int min_hits = 3;
  std::string gating = "post";
  bool coast_output = true;
  std::string output_box = "posterior";

  TrackerConfig to_config() const {
    TrackerConfig c;
    c.pipeline = pipeline == "byte" ? Pipeline::Byte : Pipeline::Sort;
    c.metric = parse_metric(metric);
    c.gate = gate;
    c.high_conf_threshold = high_conf;
    c.low_conf_floor = low_conf;
    c.max_age = max_age;
    c.min_hits = min_hits;
    c.gating = gating == "premask" ? GatingMode::PreMask : GatingMode::PostSolve;
    c.emit_coasting = coast_output;
    c.output_box =
        output_box == "detection" ? OutputBoxPolicy::Detection : OutputBoxPolicy::Posterior;
    return c;
  }
};

void add_tracker_flags(CLI::App* cmd, TrackerFlags& f) {
  cmd->add_option("--pipeline", f.pipeline, "Association pipeline")
      ->check(CLI::IsMember({"sort", "byte"}));
  cmd->add_option("--metric", f.metric, "Similarity metric")
      ->check(CLI::IsMember({"iou", "giou", "diou", "tiou"}));
  cmd->add_option("--gate", f.gate, "Minimum similarity for a match");
  cmd->add_option("--high-conf", f.high_conf, "High-confidence detection threshold");
  cmd->add_option("--low-conf", f.low_conf, "Low-confidence detection floor");
  cmd->add_option("--max-age", f.max_age, "Frames a track may coast before removal");
  cmd->add_option("--min-hits", f.min_hits, "Updates needed to confirm a track");
  cmd->add_option("--gating", f.gating, "Apply the gate after or before the solve")
      ->check(CLI::IsMember({"post", "premask"}));
  cmd->add_option("--coast-output", f.coast_output,
                  "Report a predicted box for one missed frame (default 1)");
  cmd->add_option("--output-box", f.output_box, "Box reported for matched tracks")
      ->check(CLI::IsMember({"posterior", "detection"}));
}

int cmd_track(const std::string& detections_path, const std::string& out_path,
              const TrackerFlags& flags, const std::string& from_manifest) {
  TrackerFlags effective = flags;
  if (!from_manifest.empty()) {
    std::ifstream in(from_manifest);
    if (!in) throw std::runtime_error("cannot open manifest " + from_manifest);
    const json m = json::parse(in);
    const json& c = m.at("config");
    effective.pipeline = c.value("pipeline", effective.pipeline);
    effective.metric = c.value("metric", effective.metric);
    effective.gate = c.value("gate", effective.gate);
    effective.high_conf = c.value("high_conf_threshold", effective.high_conf);
    effective.low_conf = c.value("low_conf_floor", effective.low_conf);
    effective.max_age = c.value("max_age", effective.max_age);
    effective.min_hits = c.value("min_hits", effective.min_hits);
    effective.gating = c.value("gating", effective.gating);
    effective.coast_output = c.value("coast_output", effective.coast_output);
    effective.output_box = c.value("output_box", effective.output_box);
  }

  const auto records = parse_mot_file(detections_path, MotFileKind::Detections);
  const auto per_frame = to_detections(records);
  const int max_frame = records.empty() ? 0 : records.back().frame;
  if (verbose()) {
    std::cerr << "track: " << records.size() << " detections over " << max_frame << " frames\n";
  }

  const TrackerConfig cfg = effective.to_config();
  const auto results = run_tracker(cfg, per_frame, max_frame);
  const auto out_records = to_result_records(results);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_results(out, out_records);
  out.close();

  json manifest = manifest_skeleton("track");
  manifest["config"] = tracker_to_json(cfg);
  manifest["inputs"] = {
      {"detections", {{"path", detections_path}, {"digest", fnv1a_digest(detections_path)}}}};
  manifest["outputs"] = {{"results", out_path}, {"digest", fnv1a_digest(out_path)}};
  write_manifest(out_path + ".manifest.json", manifest);
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& results_path, double iou_threshold,
             const std::string& format) {
  const auto gt_records = parse_mot_file(gt_path, MotFileKind::GroundTruth);
  const auto result_records = parse_mot_file(results_path, MotFileKind::Results);

  MetricsReport rep;
  try {
    rep = evaluate(to_gt_entries(gt_records), to_frame_results(result_records), iou_threshold);
  } catch (const std::invalid_argument& e) {
    std::cerr << "eval: " << e.what() << "\n";
    return 4;
  }

  if (format == "json") {
    json out = report_to_json(rep);
    out["inputs"] = {{"gt", {{"path", gt_path}, {"digest", fnv1a_digest(gt_path)}}},
                     {"results",
                      {{"path", results_path}, {"digest", fnv1a_digest(results_path)}}}};
    out["iou_threshold"] = iou_threshold;
    std::cout << out.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "MOTA,MOTP,IDF1,Recall,FP,FN,IDS,FM,MT,ML,GT\n";
    char line[256];
    std::snprintf(line, sizeof line, "%.4f,%.4f,%.4f,%.4f,%ld,%ld,%ld,%ld,%ld,%ld,%ld\n",
                  rep.mota, rep.motp, rep.idf1, rep.recall, rep.fp, rep.fn, rep.ids, rep.fm,
                  rep.mt, rep.ml, rep.gt_count);
    std::cout << line;
  } else {
    char line[256];
    std::snprintf(line, sizeof line, "MOTA %.4f  MOTP %.4f  IDF1 %.4f  Recall %.4f\n", rep.mota,
                  rep.motp, rep.idf1, rep.recall);
    std::cout << line;
    std::snprintf(line, sizeof line, "FP %ld  FN %ld  IDS %ld  FM %ld  MT %ld  ML %ld  GT %ld\n",
                  rep.fp, rep.fn, rep.ids, rep.fm, rep.mt, rep.ml, rep.gt_count);
    std::cout << line;
  }
  return 0;
}

int cmd_synth(ScenarioConfig cfg, const std::string& out_dir, const std::string& from_manifest) {
  if (!from_manifest.empty()) {
    std::ifstream in(from_manifest);
    if (!in) throw std::runtime_error("cannot open manifest " + from_manifest);
    const json m = json::parse(in);
    cfg = scenario_from_json(m.contains("config") && m["config"].contains("scenario")
                                 ? m["config"]["scenario"]
                                 : m.at("config"));
  }

  const Scenario scenario = generate(cfg);
  fs::create_directories(out_dir);

  const fs::path gt_path = fs::path(out_dir) / "gt.txt";
  const fs::path det_path = fs::path(out_dir) / "det.txt";
  {
    std::ofstream out(gt_path);
    write_ground_truth(out, scenario.gt);
    if (!out) throw std::runtime_error("cannot write " + gt_path.string());
  }
  {
    std::map<int, std::vector<Detection>> per_frame;
    for (size_t i = 0; i < scenario.detections.size(); ++i) {
      per_frame[static_cast<int>(i) + 1] = scenario.detections[i];
    }
    std::ofstream out(det_path);
    write_detections(out, per_frame);
    if (!out) throw std::runtime_error("cannot write " + det_path.string());
  }

  const RegimeStats stats = regime_stats(scenario);
  if (verbose()) {
    std::cerr << "synth: median IoU " << stats.median_iou << ", zero-IoU fraction "
              << stats.zero_iou_fraction << " over " << stats.pair_count << " pairs\n";
  }

  json manifest = manifest_skeleton("synth");
  manifest["config"] = {{"scenario", scenario_to_json(cfg)}};
  manifest["seed"] = cfg.seed;
  manifest["rng"] = "shiptrack-rng-v1";
  manifest["outputs"] = {{"gt", gt_path.string()},
                         {"gt_digest", fnv1a_digest(gt_path)},
                         {"det", det_path.string()},
                         {"det_digest", fnv1a_digest(det_path)}};
  manifest["regime"] = {{"median_iou", stats.median_iou},
                        {"zero_iou_fraction", stats.zero_iou_fraction},
                        {"mean_tiou", stats.mean_tiou},
                        {"pairs", stats.pair_count}};
  write_manifest(fs::path(out_dir) / "manifest.json", manifest);
  return 0;
}

struct AblateCell {
  std::string pipeline;
  std::string metric;
  std::uint64_t seed;
  MetricsReport report;
};

int cmd_ablate(const std::string& scenario_path, const std::vector<std::string>& pipelines,
               const std::vector<std::string>& metrics, const std::vector<std::uint64_t>& seeds,
               const TrackerFlags& flags, const std::string& out_path) {
  std::ifstream in(scenario_path);
  if (!in) throw std::runtime_error("cannot open scenario " + scenario_path);
  const json doc = json::parse(in);
  const json& scenario_json = doc.contains("config") && doc["config"].contains("scenario")
                                  ? doc["config"]["scenario"]
                                  : (doc.contains("scenario") ? doc["scenario"] : doc);
  const ScenarioConfig base_cfg = scenario_from_json(scenario_json);

  std::vector<AblateCell> cells;
  for (const auto& p : pipelines) {
    for (const auto& m : metrics) {
      for (const auto s : seeds) cells.push_back(AblateCell{p, m, s, {}});
    }
  }

  // Cells are independent: each owns its scenario, tracker, and evaluation.
  // Exceptions must not escape the parallel region.
  std::vector<std::string> cell_errors(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    AblateCell& cell = cells[i];
    try {
      ScenarioConfig cfg = base_cfg;
      cfg.seed = cell.seed;
      const Scenario scenario = generate(cfg);

      TrackerFlags cell_flags = flags;
      cell_flags.pipeline = cell.pipeline;
      cell_flags.metric = cell.metric;

      std::map<int, std::vector<Detection>> per_frame;
      for (size_t f = 0; f < scenario.detections.size(); ++f) {
        per_frame[static_cast<int>(f) + 1] = scenario.detections[f];
      }
      const auto results = run_tracker(cell_flags.to_config(), per_frame,
                                       static_cast<int>(scenario.detections.size()));
      cell.report = evaluate(scenario.gt, results);
    } catch (const std::exception& e) {
      cell_errors[i] = e.what();
    }
  }
  for (const auto& err : cell_errors) {
    if (!err.empty()) throw std::invalid_argument("ablate cell failed: " + err);
  }

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "pipeline,metric,seed,mota,idf1,ids,fp,fn,recall\n";
  for (const auto& c : cells) {
    char line[256];
    std::snprintf(line, sizeof line, "%s,%s,%llu,%.4f,%.4f,%ld,%ld,%ld,%.4f\n",
                  c.pipeline.c_str(), c.metric.c_str(),
                  static_cast<unsigned long long>(c.seed), c.report.mota, c.report.idf1,
                  c.report.ids, c.report.fp, c.report.fn, c.report.recall);
    out << line;
  }
  out.close();

  // Per-seed TIoU - IoU deltas, when both metrics ran.
  auto find_cell = [&](const std::string& p, const std::string& m,
                       std::uint64_t s) -> const AblateCell* {
    for (const auto& c : cells) {
      if (c.pipeline == p && c.metric == m && c.seed == s) return &c;
    }
    return nullptr;
  };

  const bool have_delta =
      std::count(metrics.begin(), metrics.end(), "iou") > 0 &&
      std::count(metrics.begin(), metrics.end(), "tiou") > 0;
  const std::string summary_path = out_path + ".summary.csv";
  if (have_delta) {
    std::ofstream sum(summary_path);
    sum << "pipeline,seed,delta_mota,delta_idf1,delta_ids\n";
    for (const auto& p : pipelines) {
      std::vector<double> dm, di;
      std::vector<long> dids;
      for (const auto s : seeds) {
        const AblateCell* a = find_cell(p, "tiou", s);
        const AblateCell* b = find_cell(p, "iou", s);
        if (!a || !b) continue;
        const double dmota = a->report.mota - b->report.mota;
        const double didf1 = a->report.idf1 - b->report.idf1;
        const long dids_v = a->report.ids - b->report.ids;
        char line[160];
        std::snprintf(line, sizeof line, "%s,%llu,%.4f,%.4f,%ld\n", p.c_str(),
                      static_cast<unsigned long long>(s), dmota, didf1, dids_v);
        sum << line;
        dm.push_back(dmota);
        di.push_back(didf1);
        dids.push_back(dids_v);
      }
      auto median = [](auto v) -> double {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        const size_t mid = v.size() / 2;
        return v.size() % 2 == 1 ? double(v[mid]) : 0.5 * (double(v[mid - 1]) + double(v[mid]));
      };
      char line[200];
      std::snprintf(line, sizeof line,
                    "%s: median delta (tiou - iou): MOTA %+.4f  IDF1 %+.4f  IDS %+.1f\n",
                    p.c_str(), median(dm), median(di), median(dids));
      std::cout << line;
    }
  }

  json manifest = manifest_skeleton("ablate");
  manifest["config"] = {{"scenario", scenario_to_json(base_cfg)},
                        {"tracker", tracker_to_json(flags.to_config())},
                        {"pipelines", pipelines},
                        {"metrics", metrics},
                        {"seeds", seeds}};
  manifest["inputs"] = {
      {"scenario", {{"path", scenario_path}, {"digest", fnv1a_digest(scenario_path)}}}};
  manifest["outputs"] = {{"csv", out_path}, {"digest", fnv1a_digest(out_path)}};
  if (have_delta) manifest["outputs"]["summary"] = summary_path;
  write_manifest(out_path + ".manifest.json", manifest);
  return 0;
}

int cmd_metric_table(const std::string& pairs_path) {
  struct Pair {
    BBox a, b;
  };
  std::vector<Pair> pairs;

  if (pairs_path.empty()) {
    // Demo set: the two shape-sensitivity pairs, an identical pair, and
    // representatives of the large/small/no-overlap regimes.
    pairs.push_back({BBox(0, 0, 2, 2), BBox(1, 1, 2, 2)});
    pairs.push_back({BBox(0, 0, 2, 2), BBox(1, 1, 4, 1)});
    pairs.push_back({BBox(0, 0, 1, 1), BBox(0, 0, 1, 1)});
    pairs.push_back({BBox(0, 0, 10, 10), BBox(1, 0, 10, 10)});
    pairs.push_back({BBox(0, 0, 10, 10), BBox(2, 1, 10, 10)});
    pairs.push_back({BBox(0, 0, 10, 10), BBox(7, 6, 10, 10)});
    pairs.push_back({BBox(0, 0, 10, 10), BBox(12, 0, 10, 10)});
    pairs.push_back({BBox(0, 0, 10, 10), BBox(15, 8, 12, 9)});
  } else {
    std::ifstream in(pairs_path);
    if (!in) throw std::runtime_error("cannot open " + pairs_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      std::stringstream ss(line);
      double v[8];
      char comma;
      for (int i = 0; i < 8; ++i) {
        if (!(ss >> v[i])) throw MotParseError(line_no, line, "expected 8 numbers");
        if (i < 7 && !(ss >> comma)) throw MotParseError(line_no, line, "expected 8 numbers");
      }
      try {
        pairs.push_back({BBox(v[0], v[1], v[2], v[3]), BBox(v[4], v[5], v[6], v[7])});
      } catch (const std::invalid_argument& e) {
        throw MotParseError(line_no, line, e.what());
      }
    }
  }

  // Regime taxonomy by IoU value: large / small / no overlap.
  auto regime = [](double iou_v) {
    if (iou_v >= 0.5) return "large";
    if (iou_v > 0.0) return "small";
    return "none";
  };

  std::cout << "box1                box2                regime  IoU      GIoU     DIoU     TIoU\n";
  for (const auto& p : pairs) {
    char geom[64];
    std::snprintf(geom, sizeof geom, "(%g,%g,%g,%g)", p.a.x(), p.a.y(), p.a.w(), p.a.h());
    char geom2[64];
    std::snprintf(geom2, sizeof geom2, "(%g,%g,%g,%g)", p.b.x(), p.b.y(), p.b.w(), p.b.h());
    const double i = iou(p.a, p.b);
    char line[240];
    std::snprintf(line, sizeof line, "%-19s %-19s %-7s %8.4f %8.4f %8.4f %8.4f\n", geom, geom2,
                  regime(i), i, giou(p.a, p.b), diou(p.a, p.b), tiou(p.a, p.b));
    std::cout << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-ship tracking experiments: tracking, evaluation, synthetic scenarios"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // track
  auto* track = app.add_subcommand("track", "Run a tracker over a MOT17 detection file");
  std::string det_path, track_out, track_manifest;
  TrackerFlags track_flags;
  track->add_option("--detections", det_path, "MOT17 detection file")->required();
  track->add_option("--out", track_out, "Output MOT17 result file")->required();
  track->add_option("--from-manifest", track_manifest, "Reuse the tracker config of a manifest");
  add_tracker_flags(track, track_flags);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a result file against ground truth");
  std::string gt_path, results_path, eval_format = "table";
  double eval_iou = 0.5;
  eval_cmd->add_option("--gt", gt_path, "MOT17 ground-truth file")->required();
  eval_cmd->add_option("--results", results_path, "MOT17 result file")->required();
  eval_cmd->add_option("--iou-threshold", eval_iou, "True-positive IoU threshold");
  eval_cmd->add_option("--format", eval_format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}));

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic maritime scenario");
  ScenarioConfig synth_cfg;
  std::string synth_out_dir, synth_manifest;
  synth->add_option("--ships", synth_cfg.n_ships, "Number of ships");
  synth->add_option("--frames", synth_cfg.n_frames, "Full-rate frame count");
  synth->add_option("--width", synth_cfg.image_width, "Image width in pixels");
  synth->add_option("--height", synth_cfg.image_height, "Image height in pixels");
  synth->add_option("--fps-subsample", synth_cfg.fps_subsample, "Keep every k-th frame");
  synth->add_option("--jitter-std", synth_cfg.jitter_std, "Camera shake std in pixels");
  synth->add_option("--det-noise-std", synth_cfg.detection_noise_std, "Per-box noise std");
  synth->add_option("--miss-prob", synth_cfg.miss_prob, "Detection miss probability");
  synth->add_option("--clutter-rate", synth_cfg.clutter_rate, "Expected clutter per frame");
  synth->add_option("--size-min", synth_cfg.size_min, "Smallest ship dimension");
  synth->add_option("--size-max", synth_cfg.size_max, "Largest ship dimension");
  synth->add_option("--speed-min", synth_cfg.speed_min, "Slowest speed, px/frame");
  synth->add_option("--speed-max", synth_cfg.speed_max, "Fastest speed, px/frame");
  synth->add_option("--seed", synth_cfg.seed, "Scenario seed");
  synth->add_option("--out-dir", synth_out_dir, "Directory for gt.txt/det.txt")->required();
  synth->add_option("--from-manifest", synth_manifest, "Regenerate from a manifest");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Cross product of pipelines x metrics x seeds");
  std::string abl_scenario, abl_out;
  std::vector<std::string> abl_pipelines{"sort", "byte"};
  std::vector<std::string> abl_metrics{"iou", "giou", "diou", "tiou"};
  std::vector<std::uint64_t> abl_seeds{1, 2, 3, 4, 5};
  TrackerFlags abl_flags;
  ablate->add_option("--scenario", abl_scenario, "Scenario config or synth manifest (json)")
      ->required();
  ablate->add_option("--pipelines", abl_pipelines, "Pipelines to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"sort", "byte"}));
  ablate->add_option("--metrics", abl_metrics, "Metrics to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"iou", "giou", "diou", "tiou"}));
  ablate->add_option("--seeds", abl_seeds, "Scenario seeds")->delimiter(',');
  ablate->add_option("--out", abl_out, "Output CSV path")->required();
  add_tracker_flags(ablate, abl_flags);

  // metric-table
  auto* table = app.add_subcommand("metric-table", "Print all four metrics for box pairs");
  std::string pairs_path;
  table->add_option("--pairs", pairs_path, "File with x,y,w,h,x,y,w,h per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (track->parsed()) return cmd_track(det_path, track_out, track_flags, track_manifest);
    if (eval_cmd->parsed()) return cmd_eval(gt_path, results_path, eval_iou, eval_format);
    if (synth->parsed()) return cmd_synth(synth_cfg, synth_out_dir, synth_manifest);
    if (ablate->parsed()) {
      return cmd_ablate(abl_scenario, abl_pipelines, abl_metrics, abl_seeds, abl_flags, abl_out);
    }
    if (table->parsed()) return cmd_metric_table(pairs_path);
  } catch (const MotParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
