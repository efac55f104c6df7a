#include "shiptrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace shiptrack {

namespace {

constexpr double kTieTolerance = 1e-9;

// Kuhn-Munkres with potentials, minimizing cost, rows <= cols.
// Returns the min total cost; `row_to_col` receives the assignment.
double solve_min_cost(const Eigen::MatrixXd& cost, std::vector<int>* row_to_col) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  if (row_to_col) row_to_col->assign(n, -1);
  double total = 0.0;
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) {
      total += cost(p[j] - 1, j - 1);
      if (row_to_col) (*row_to_col)[p[j] - 1] = j - 1;
    }
  }
  return total;
}

double max_total(const Eigen::MatrixXd& sim) {
  if (sim.rows() == 0 || sim.cols() == 0) return 0.0;
  if (sim.rows() <= sim.cols()) {
    return -solve_min_cost(-sim, nullptr);
  }
  const Eigen::MatrixXd t = sim.transpose();
  return -solve_min_cost(-t, nullptr);
}

// Max total over rows [row_begin, rows) and the listed columns.
double max_total_sub(const Eigen::MatrixXd& sim, int row_begin, const std::vector<int>& cols) {
  const int r = static_cast<int>(sim.rows()) - row_begin;
  const int c = static_cast<int>(cols.size());
  if (r <= 0 || c == 0) return 0.0;
  Eigen::MatrixXd sub(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) sub(i, j) = sim(row_begin + i, cols[j]);
  return max_total(sub);
}

// Lexicographically smallest (row, col) full-cardinality assignment among
// those achieving the optimal total. Rows are settled in increasing order;
// each takes the smallest column that still sustains the optimum, or is
// left unmatched when rows outnumber columns and skipping is optimal.
std::vector<std::pair<int, int>> lex_optimal_assignment(const Eigen::MatrixXd& sim) {
  const int rows = static_cast<int>(sim.rows());
  const int cols = static_cast<int>(sim.cols());
  std::vector<std::pair<int, int>> fixed;
  if (rows == 0 || cols == 0) return fixed;

  std::vector<int> avail(cols);
  std::iota(avail.begin(), avail.end(), 0);
  double target = max_total_sub(sim, 0, avail);

  for (int i = 0; i < rows && !avail.empty(); ++i) {
    bool matched = false;
    for (size_t k = 0; k < avail.size(); ++k) {
      const int j = avail[k];
      std::vector<int> rest = avail;
      rest.erase(rest.begin() + static_cast<ptrdiff_t>(k));
      const double sub = max_total_sub(sim, i + 1, rest);
      if (sim(i, j) + sub >= target - kTieTolerance) {
        fixed.emplace_back(i, j);
        avail = std::move(rest);
        target = sub;
        matched = true;
        break;
      }
    }
    if (!matched) {
      // Only reachable when remaining rows outnumber columns.
      target = max_total_sub(sim, i + 1, avail);
    }
  }
  return fixed;
}

void check_finite(const Eigen::MatrixXd& sim) {
  if (!sim.allFinite()) {
    throw std::invalid_argument("assignment: similarity matrix has non-finite entries");
  }
}

AssignmentResult collect(const Eigen::MatrixXd& sim, double gate,
                         std::vector<std::pair<int, int>> pairs) {
  AssignmentResult out;
  std::vector<char> row_used(sim.rows(), 0), col_used(sim.cols(), 0);
  for (const auto& [i, j] : pairs) {
    if (sim(i, j) < gate) continue;
    out.matches.emplace_back(i, j);
    row_used[i] = 1;
    col_used[j] = 1;
  }
  for (int i = 0; i < sim.rows(); ++i)
    if (!row_used[i]) out.unmatched_tracks.push_back(i);
  for (int j = 0; j < sim.cols(); ++j)
    if (!col_used[j]) out.unmatched_detections.push_back(j);
  return out;
}

}  // namespace

double AssignmentResult::total_similarity(const Eigen::MatrixXd& sim) const {
  double total = 0.0;
  for (const auto& [i, j] : matches) total += sim(i, j);
  return total;
}

AssignmentResult solve_assignment(const Eigen::MatrixXd& sim, double gate, GatingMode mode) {
  check_finite(sim);
  const int rows = static_cast<int>(sim.rows());
  const int cols = static_cast<int>(sim.cols());
  if (rows == 0 || cols == 0) return collect(sim, gate, {});

  if (mode == GatingMode::PostSolve) {
    return collect(sim, gate, lex_optimal_assignment(sim));
  }

  // PreMask: sub-gate cells become unmatchable. Each row gets a private
  // zero-value dummy column, so the solve maximizes the number of gated
  // matches first and their total similarity second.
  const double bonus = 8.0 * (std::min(rows, cols) + 1) *
                       std::max(1.0, sim.cwiseAbs().maxCoeff());
  const double barrier = 4.0 * bonus * (rows + cols + 2);
  Eigen::MatrixXd aug(rows, cols + rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      aug(i, j) = sim(i, j) >= gate ? sim(i, j) + bonus : -bonus;
    }
    for (int k = 0; k < rows; ++k) {
      aug(i, cols + k) = (k == i) ? 0.0 : -barrier;
    }
  }
  auto pairs = lex_optimal_assignment(aug);
  std::erase_if(pairs, [&](const auto& p) { return p.second >= cols; });
  return collect(sim, gate, std::move(pairs));
}

AssignmentResult greedy_assignment(const Eigen::MatrixXd& sim, double gate) {
  check_finite(sim);
  const int rows = static_cast<int>(sim.rows());
  const int cols = static_cast<int>(sim.cols());
  std::vector<char> row_used(rows, 0), col_used(cols, 0);
  std::vector<std::pair<int, int>> pairs;

  while (true) {
    double best = -std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < rows; ++i) {
      if (row_used[i]) continue;
      for (int j = 0; j < cols; ++j) {
        if (col_used[j]) continue;
        if (sim(i, j) > best) {
          best = sim(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0 || best < gate) break;
    pairs.emplace_back(bi, bj);
    row_used[bi] = 1;
    col_used[bj] = 1;
  }
  return collect(sim, gate, std::move(pairs));
}

namespace {

// Below this many cells the parallel dispatch costs more than the fill.
constexpr int kMinParallelCells = 4096;

Eigen::MatrixXd fill_matrix(std::span<const BBox> preds, std::span<const BBox> dets,
                            SimilarityMetric kind, bool parallel) {
  const int rows = static_cast<int>(preds.size());
  const int cols = static_cast<int>(dets.size());
  Eigen::MatrixXd out(rows, cols);
  if (rows == 0 || cols == 0) return out;

  if (parallel && rows * cols >= kMinParallelCells) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        out(i, j) = similarity(preds[i], dets[j], kind);
      }
    }
  } else {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        out(i, j) = similarity(preds[i], dets[j], kind);
      }
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd similarity_matrix(std::span<const BBox> preds, std::span<const BBox> dets,
                                  SimilarityMetric kind) {
  return fill_matrix(preds, dets, kind, true);
}

Eigen::MatrixXd similarity_matrix_serial(std::span<const BBox> preds, std::span<const BBox> dets,
                                         SimilarityMetric kind) {
  return fill_matrix(preds, dets, kind, false);
}

namespace detail {

double max_total_assignment(const Eigen::MatrixXd& sim) { return max_total(sim); }

}  // namespace detail

}  // namespace shiptrack
