#include "shiptrack/clear_metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "shiptrack/assignment.hpp"

namespace shiptrack {

FrameCorrespondence match_frame(const std::vector<GtEntry>& gt_boxes,
                                const std::vector<std::pair<int, BBox>>& hyp_boxes,
                                double iou_threshold, const std::map<int, int>& prev) {
  const int n_gt = static_cast<int>(gt_boxes.size());
  const int n_hyp = static_cast<int>(hyp_boxes.size());

  FrameCorrespondence out;
  std::vector<char> gt_done(n_gt, 0), hyp_done(n_hyp, 0);

  // Carry-over: keep last frame's pairing while it still holds.
  for (int g = 0; g < n_gt; ++g) {
    const auto it = prev.find(gt_boxes[g].object_id);
    if (it == prev.end()) continue;
    for (int h = 0; h < n_hyp; ++h) {
      if (hyp_done[h] || hyp_boxes[h].first != it->second) continue;
      if (iou(gt_boxes[g].bbox, hyp_boxes[h].second) >= iou_threshold) {
        out.matches.emplace_back(g, h);
        gt_done[g] = 1;
        hyp_done[h] = 1;
      }
      break;
    }
  }

  // Residual assignment over whatever the carry-over left open.
  std::vector<int> gt_idx, hyp_idx;
  for (int g = 0; g < n_gt; ++g)
    if (!gt_done[g]) gt_idx.push_back(g);
  for (int h = 0; h < n_hyp; ++h)
    if (!hyp_done[h]) hyp_idx.push_back(h);

  if (!gt_idx.empty() && !hyp_idx.empty()) {
    Eigen::MatrixXd sim(gt_idx.size(), hyp_idx.size());
    for (size_t i = 0; i < gt_idx.size(); ++i) {
      for (size_t j = 0; j < hyp_idx.size(); ++j) {
        sim(i, j) = iou(gt_boxes[gt_idx[i]].bbox, hyp_boxes[hyp_idx[j]].second);
      }
    }
    const AssignmentResult res = solve_assignment(sim, iou_threshold, GatingMode::PreMask);
    for (const auto& [i, j] : res.matches) {
      out.matches.emplace_back(gt_idx[i], hyp_idx[j]);
      gt_done[gt_idx[i]] = 1;
      hyp_done[hyp_idx[j]] = 1;
    }
  }

  std::sort(out.matches.begin(), out.matches.end());
  for (int g = 0; g < n_gt; ++g)
    if (!gt_done[g]) out.unmatched_gt.push_back(g);
  for (int h = 0; h < n_hyp; ++h)
    if (!hyp_done[h]) out.unmatched_hyp.push_back(h);
  return out;
}

namespace {

struct ObjectLife {
  long present = 0;
  long matched = 0;
  bool ever_matched = false;
  bool in_gap = false;
};

}  // namespace

MetricsReport evaluate(const std::vector<GtEntry>& gt, const std::vector<FrameResult>& results,
                       double iou_threshold) {
  int max_frame = 0;
  for (const auto& e : gt) {
    if (e.frame < 1) throw std::invalid_argument("evaluate: ground-truth frame index < 1");
    max_frame = std::max(max_frame, e.frame);
  }
  int prev_result_frame = 0;
  for (const auto& r : results) {
    if (r.frame_index <= prev_result_frame) {
      throw std::invalid_argument("evaluate: result frames must strictly increase");
    }
    prev_result_frame = r.frame_index;
  }
  if (!results.empty() && results.back().frame_index > max_frame) {
    throw std::invalid_argument("evaluate: result frame beyond ground-truth range");
  }

  std::map<int, std::vector<GtEntry>> gt_by_frame;      // considered
  std::map<int, std::vector<GtEntry>> ignored_by_frame;  // considered == false
  std::set<std::pair<int, int>> seen_keys;
  for (const auto& e : gt) {
    if (!seen_keys.insert({e.frame, e.object_id}).second) {
      throw std::invalid_argument("evaluate: duplicate (frame, object_id) in ground truth");
    }
    (e.considered ? gt_by_frame : ignored_by_frame)[e.frame].push_back(e);
  }
  std::map<int, const FrameResult*> results_by_frame;
  for (const auto& r : results) results_by_frame[r.frame_index] = &r;

  MetricsReport rep;
  long tp = 0;
  double iou_sum = 0.0;
  std::map<int, int> correspondence;        // gt object id -> track id, persists across gaps
  std::map<int, ObjectLife> lives;          // per considered gt object
  std::map<std::pair<int, int>, long> overlap_count;  // (gt id, track id) -> frames
  long hyp_total = 0;

  for (int frame = 1; frame <= max_frame; ++frame) {
    static const std::vector<GtEntry> no_gt;
    const auto git = gt_by_frame.find(frame);
    const std::vector<GtEntry>& frame_gt = git == gt_by_frame.end() ? no_gt : git->second;

    std::vector<std::pair<int, BBox>> frame_hyp;
    if (auto rit = results_by_frame.find(frame); rit != results_by_frame.end()) {
      for (const auto& o : rit->second->outputs) frame_hyp.emplace_back(o.track_id, o.bbox);
    }

    const FrameCorrespondence corr =
        match_frame(frame_gt, frame_hyp, iou_threshold, correspondence);

    // Hypotheses overlapping non-considered ground truth are absorbed.
    long absorbed = 0;
    std::vector<char> hyp_absorbed(frame_hyp.size(), 0);
    if (const auto iit = ignored_by_frame.find(frame); iit != ignored_by_frame.end()) {
      std::vector<char> ign_used(iit->second.size(), 0);
      for (int h : corr.unmatched_hyp) {
        for (size_t k = 0; k < iit->second.size(); ++k) {
          if (ign_used[k]) continue;
          if (iou(iit->second[k].bbox, frame_hyp[h].second) >= iou_threshold) {
            ign_used[k] = 1;
            hyp_absorbed[h] = 1;
            ++absorbed;
            break;
          }
        }
      }
    }

    tp += static_cast<long>(corr.matches.size());
    rep.fn += static_cast<long>(corr.unmatched_gt.size());
    rep.fp += static_cast<long>(corr.unmatched_hyp.size()) - absorbed;
    hyp_total += static_cast<long>(frame_hyp.size()) - absorbed;

    std::set<int> matched_objects;
    for (const auto& [g, h] : corr.matches) {
      const int gt_id = frame_gt[g].object_id;
      const int track_id = frame_hyp[h].first;
      iou_sum += iou(frame_gt[g].bbox, frame_hyp[h].second);
      matched_objects.insert(gt_id);

      if (const auto it = correspondence.find(gt_id);
          it != correspondence.end() && it->second != track_id) {
        rep.ids += 1;
      }
      correspondence[gt_id] = track_id;
    }

    for (const auto& e : frame_gt) {
      auto& life = lives[e.object_id];
      life.present += 1;
      if (matched_objects.count(e.object_id)) {
        if (life.ever_matched && life.in_gap) rep.fm += 1;
        life.ever_matched = true;
        life.in_gap = false;
        life.matched += 1;
      } else if (life.ever_matched) {
        life.in_gap = true;
      }
    }

    // Identity overlap counts feed the global IDF1 matching.
    for (const auto& e : frame_gt) {
      for (size_t h = 0; h < frame_hyp.size(); ++h) {
        if (hyp_absorbed[h]) continue;
        if (iou(e.bbox, frame_hyp[h].second) >= iou_threshold) {
          overlap_count[{e.object_id, frame_hyp[h].first}] += 1;
        }
      }
    }
  }

  rep.gt_count = 0;
  for (const auto& [id, life] : lives) {
    rep.gt_count += life.present;
    const double ratio = life.present > 0 ? double(life.matched) / double(life.present) : 0.0;
    if (ratio >= 0.8) rep.mt += 1;
    if (ratio <= 0.2) rep.ml += 1;
  }
  // Objects never seen in any frame contribute nothing; gt_count covers all
  // considered entries even when a frame had no hypotheses at all.

  rep.recall = rep.gt_count > 0 ? double(tp) / double(rep.gt_count) : 0.0;
  rep.motp = tp > 0 ? iou_sum / double(tp) : 0.0;
  rep.mota = 1.0 - double(rep.fp + rep.fn + rep.ids) / double(std::max<long>(rep.gt_count, 1));

  // IDF1: optimal global one-to-one mapping of gt ids to track ids.
  std::vector<int> gt_ids;
  std::vector<int> track_ids;
  for (const auto& [key, cnt] : overlap_count) {
    if (std::find(gt_ids.begin(), gt_ids.end(), key.first) == gt_ids.end())
      gt_ids.push_back(key.first);
    if (std::find(track_ids.begin(), track_ids.end(), key.second) == track_ids.end())
      track_ids.push_back(key.second);
  }
  double idtp = 0.0;
  if (!gt_ids.empty() && !track_ids.empty()) {
    Eigen::MatrixXd counts =
        Eigen::MatrixXd::Zero(static_cast<int>(gt_ids.size()), static_cast<int>(track_ids.size()));
    for (size_t i = 0; i < gt_ids.size(); ++i) {
      for (size_t j = 0; j < track_ids.size(); ++j) {
        if (const auto it = overlap_count.find({gt_ids[i], track_ids[j]});
            it != overlap_count.end()) {
          counts(i, j) = static_cast<double>(it->second);
        }
      }
    }
    idtp = detail::max_total_assignment(counts);
  }
  const double idfn = double(rep.gt_count) - idtp;
  const double idfp = double(hyp_total) - idtp;
  const double denom = 2.0 * idtp + idfp + idfn;
  rep.idf1 = denom > 0.0 ? 2.0 * idtp / denom : (rep.gt_count == 0 && hyp_total == 0 ? 1.0 : 0.0);

  return rep;
}

}  // namespace shiptrack
