#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shiptrack/bbox.hpp"

namespace shiptrack {

/// One-to-one matching outcome over a score matrix. Every row (track) and
/// column (detection) index of the input appears exactly once, either in
/// `matches` or in the corresponding unmatched list.
struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  // (track_index, detection_index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;

  double total_similarity(const Eigen::MatrixXd& sim) const;
};

enum class GatingMode {
  PostSolve,  // solve on the full matrix, then strike sub-gate pairs
  PreMask,    // treat sub-gate pairs as unmatchable before solving
};

/// Maximum-total-similarity assignment (Kuhn-Munkres), gated at `gate`.
/// Ties in total similarity are broken toward the lexicographically lowest
/// (track_index, detection_index) match list. Entries must be finite.
AssignmentResult solve_assignment(const Eigen::MatrixXd& sim, double gate,
                                  GatingMode mode = GatingMode::PostSolve);

/// Repeatedly takes the globally largest remaining entry >= gate and
/// removes its row and column. Ties break toward the lowest (row, col).
AssignmentResult greedy_assignment(const Eigen::MatrixXd& sim, double gate);

/// Pairwise metric scores, entry (i, j) = metric(preds[i], dets[j]).
/// The default kernel fills rows in parallel with OpenMP; the serial
/// variant is the reference implementation the tests compare against.
Eigen::MatrixXd similarity_matrix(std::span<const BBox> preds, std::span<const BBox> dets,
                                  SimilarityMetric kind);
Eigen::MatrixXd similarity_matrix_serial(std::span<const BBox> preds, std::span<const BBox> dets,
                                         SimilarityMetric kind);

namespace detail {

/// Max-total full-cardinality assignment value over the given matrix
/// (min(rows, cols) pairs). Helper shared by the solver and its tests.
double max_total_assignment(const Eigen::MatrixXd& sim);

}  // namespace detail

}  // namespace shiptrack
