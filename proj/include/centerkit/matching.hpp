#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "centerkit/annotations.hpp"
#include "centerkit/peaks.hpp"

namespace centerkit {

/// Dense row-major cost matrix; rows are ground truths, columns predictions.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  enum class Padding { kNone, kRows, kCols };

  // (row, col) pairs sorted by row.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
  // Which side was padded to square the problem (the deficient one).
  Padding padding = Padding::kNone;
};

/// Minimum-cost assignment, O(n^3) shortest augmenting path with potentials.
/// Rectangular inputs are padded to square with a constant larger than
/// every entry; padded pairs are dropped. Throws std::invalid_argument on a
/// non-finite entry.
Assignment hungarian(const CostMatrix& cost);

/// Exhaustive enumeration of injective assignments of the smaller side;
/// the first optimum in lexicographic order wins. Test oracle only.
/// Throws std::invalid_argument when min(rows, cols) > 8.
Assignment brute_force_assignment(const CostMatrix& cost);

struct MatchCostParams {
  double lambda = 1.0;
  double mu = 1.0;
};

struct GroundTruthCenter {
  double x = 0.0;
  double y = 0.0;
  // Target probability at the point; exactly 1 at a box center.
  double gc = 1.0;
  // Refinement radius in pixels (half the box diagonal).
  double radius = 0.0;
  SizeBand band = SizeBand::kSmall;
  BoundingBox box;

  static GroundTruthCenter from_box(const BoundingBox& box);
};

/// lambda * |P - P'| + mu * |gc - score|, with the distance taken on
/// coordinates divided by the image width and height.
double match_cost(const GroundTruthCenter& gt, const CenterPoint& pred,
                  const MatchCostParams& params, const ImageInfo& image);

struct MatchedPair {
  std::size_t gt = 0;
  std::size_t pred = 0;
  double cost = 0.0;
  // Euclidean distance in image pixels.
  double distance = 0.0;
};

struct MatchSet {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_gt;
  std::vector<std::size_t> unmatched_pred;
  Assignment::Padding padding = Assignment::Padding::kNone;
};

CostMatrix build_cost_matrix(std::span<const GroundTruthCenter> gts,
                             std::span<const CenterPoint> preds, const MatchCostParams& params,
                             const ImageInfo& image);

/// Optimal assignment on match_cost, then any pair farther apart (in
/// pixels) than its ground truth's radius is split into two unmatched points.
MatchSet match_and_refine(std::span<const GroundTruthCenter> gts,
                          std::span<const CenterPoint> preds, const MatchCostParams& params,
                          const ImageInfo& image);

}  // namespace centerkit
