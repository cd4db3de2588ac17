#include "centerkit/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace centerkit {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("cost matrix data length does not match its shape");
  }
}

Assignment hungarian(const CostMatrix& cost) {
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  Assignment result;
  if (rows == 0 || cols == 0) return result;

  double max_entry = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = cost(r, c);
      if (!std::isfinite(v)) throw std::invalid_argument("hungarian: non-finite cost entry");
      max_entry = std::max(max_entry, std::abs(v));
    }
  }
  const std::size_t n = std::max(rows, cols);
  const double pad = max_entry + 1.0;
  if (rows < cols) result.padding = Assignment::Padding::kRows;
  if (cols < rows) result.padding = Assignment::Padding::kCols;
  auto entry = [&](std::size_t r, std::size_t c) {
    return (r < rows && c < cols) ? cost(r, c) : pad;
  };

  // 1-based potentials u (rows), v (cols); col_owner[j] is the row matched to
  // column j, 0 meaning free. Rows are inserted one at a time in index order
  // and each insertion grows a shortest augmenting path (Dijkstra over
  // reduced costs); ties pick the lowest column, which keeps the result
  // deterministic.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> col_owner(n + 1, 0), prev_col(n + 1, 0);
  std::vector<char> visited(n + 1);
  for (std::size_t row = 1; row <= n; ++row) {
    col_owner[0] = row;
    std::size_t col = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(visited.begin(), visited.end(), 0);
    do {
      visited[col] = 1;
      const std::size_t r = col_owner[col];
      double delta = kInf;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (visited[j]) continue;
        const double reduced = entry(r - 1, j - 1) - u[r] - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          prev_col[j] = col;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          next = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (visited[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col = next;
    } while (col_owner[col] != 0);
    do {
      const std::size_t prev = prev_col[col];
      col_owner[col] = col_owner[prev];
      col = prev;
    } while (col != 0);
  }

  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t r = col_owner[j] - 1;
    const std::size_t c = j - 1;
    if (r < rows && c < cols) result.pairs.emplace_back(r, c);
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  for (const auto& [r, c] : result.pairs) result.total_cost += cost(r, c);
  return result;
}

namespace {

struct BruteForceSearch {
  const CostMatrix& cost;
  bool transposed;
  std::size_t primary;
  std::size_t secondary;
  std::vector<std::size_t> current;
  std::vector<char> used;
  std::vector<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();

  double at(std::size_t p, std::size_t s) const {
    return transposed ? cost(s, p) : cost(p, s);
  }

  void run(std::size_t depth, double partial) {
    if (depth == primary) {
      if (partial < best_cost) {
        best_cost = partial;
        best = current;
      }
      return;
    }
    for (std::size_t s = 0; s < secondary; ++s) {
      if (used[s]) continue;
      used[s] = 1;
      current[depth] = s;
      run(depth + 1, partial + at(depth, s));
      used[s] = 0;
    }
  }
};

}  // namespace

Assignment brute_force_assignment(const CostMatrix& cost) {
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  if (std::min(rows, cols) > 8) {
    throw std::invalid_argument("brute_force_assignment: min(rows, cols) exceeds 8");
  }
  Assignment result;
  if (rows == 0 || cols == 0) return result;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(cost(r, c))) {
        throw std::invalid_argument("brute_force_assignment: non-finite cost entry");
      }
    }
  }
  const bool transposed = rows > cols;
  BruteForceSearch search{cost, transposed, std::min(rows, cols), std::max(rows, cols),
                          std::vector<std::size_t>(std::min(rows, cols)),
                          std::vector<char>(std::max(rows, cols), 0), {}};
  search.run(0, 0.0);
  for (std::size_t p = 0; p < search.best.size(); ++p) {
    if (transposed) {
      result.pairs.emplace_back(search.best[p], p);
    } else {
      result.pairs.emplace_back(p, search.best[p]);
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  for (const auto& [r, c] : result.pairs) result.total_cost += cost(r, c);
  if (rows < cols) result.padding = Assignment::Padding::kRows;
  if (cols < rows) result.padding = Assignment::Padding::kCols;
  return result;
}

GroundTruthCenter GroundTruthCenter::from_box(const BoundingBox& box) {
  GroundTruthCenter gt;
  const Point2 c = box_center(box);
  gt.x = c.x;
  gt.y = c.y;
  gt.gc = 1.0;
  gt.radius = box_diagonal_threshold(box);
  gt.band = size_band(box);
  gt.box = box;
  return gt;
}

double match_cost(const GroundTruthCenter& gt, const CenterPoint& pred,
                  const MatchCostParams& params, const ImageInfo& image) {
  const double dx = (gt.x - pred.x) / static_cast<double>(image.width);
  const double dy = (gt.y - pred.y) / static_cast<double>(image.height);
  return params.lambda * std::hypot(dx, dy) + params.mu * std::abs(gt.gc - pred.score);
}

CostMatrix build_cost_matrix(std::span<const GroundTruthCenter> gts,
                             std::span<const CenterPoint> preds, const MatchCostParams& params,
                             const ImageInfo& image) {
  CostMatrix cost(gts.size(), preds.size());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (std::size_t p = 0; p < preds.size(); ++p) {
      cost(g, p) = match_cost(gts[g], preds[p], params, image);
    }
  }
  return cost;
}

MatchSet match_and_refine(std::span<const GroundTruthCenter> gts,
                          std::span<const CenterPoint> preds, const MatchCostParams& params,
                          const ImageInfo& image) {
  const CostMatrix cost = build_cost_matrix(gts, preds, params, image);
  const Assignment assignment = hungarian(cost);

  MatchSet out;
  out.padding = assignment.padding;
  std::vector<char> gt_matched(gts.size(), 0);
  std::vector<char> pred_matched(preds.size(), 0);
  for (const auto& [g, p] : assignment.pairs) {
    const double distance = std::hypot(gts[g].x - preds[p].x, gts[g].y - preds[p].y);
    if (distance > gts[g].radius) continue;
    out.pairs.push_back({g, p, cost(g, p), distance});
    gt_matched[g] = 1;
    pred_matched[p] = 1;
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gt_matched[g]) out.unmatched_gt.push_back(g);
  }
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (!pred_matched[p]) out.unmatched_pred.push_back(p);
  }
  return out;
}

}  // namespace centerkit
