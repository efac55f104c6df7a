#pragma once

#include <map>
#include <utility>
#include <vector>

#include "shiptrack/bbox.hpp"
#include "shiptrack/tracker.hpp"

namespace shiptrack {

/// One ground-truth box in one frame, MOT17-style. Entries with
/// considered=false are excluded from the ground-truth count and only
/// absorb hypotheses so they are not charged as false positives.
struct GtEntry {
  int frame = 0;
  int object_id = 0;
  BBox bbox;
  double visibility = 1.0;
  int class_id = -1;
  bool considered = true;
};

struct MetricsReport {
  double mota = 0.0;
  double motp = 0.0;  // mean IoU over true positives
  double idf1 = 0.0;
  double recall = 0.0;
  long fp = 0;
  long fn = 0;
  long ids = 0;
  long fm = 0;
  long mt = 0;
  long ml = 0;
  long gt_count = 0;
};

/// Per-frame correspondence between ground truth and hypotheses,
/// indices into the frame's input lists.
struct FrameCorrespondence {
  std::vector<std::pair<int, int>> matches;  // (gt index, hyp index)
  std::vector<int> unmatched_gt;
  std::vector<int> unmatched_hyp;
};

/// Matches one frame: pairs carried over from `prev` (gt object id ->
/// track id) are kept while their IoU stays at or above the threshold,
/// then the residual assignment maximizes matches and total IoU.
FrameCorrespondence match_frame(const std::vector<GtEntry>& gt_boxes,
                                const std::vector<std::pair<int, BBox>>& hyp_boxes,
                                double iou_threshold, const std::map<int, int>& prev = {});

/// CLEAR/identity metrics over a sequence. `results` must carry strictly
/// increasing frame indices within [1, last ground-truth frame]; anything
/// else throws std::invalid_argument (frame misalignment).
MetricsReport evaluate(const std::vector<GtEntry>& gt, const std::vector<FrameResult>& results,
                       double iou_threshold = 0.5);

}  // namespace shiptrack
