#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "centerkit/heatmap.hpp"

namespace centerkit {

/// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before any log.
inline constexpr double kProbEpsilon = 1e-7;

double clamp_probability(double p);

struct BcflParams {
  double alpha = 0.75;
  double gamma = 2.0;
};

/// Binary focal loss, label y is +1 or -1.
double focal_loss(double p, int y, double alpha, double gamma);

/// Quality focal loss for a continuous target y in [0, 1].
double qfl(double p, double y, double gamma);

/// Target-dependent weight alpha*y + (1-alpha)*(1-y).
inline double alpha_c(double y, double alpha) { return alpha * y + (1.0 - alpha) * (1.0 - y); }

/// Balanced continuous focal loss: alpha_c(y) * qfl(p, y, gamma), non-negative.
double bcfl(double p, double y, const BcflParams& params);

/// d bcfl / dp for p inside the open clamp interval (throws
/// std::domain_error otherwise). Returns 0 at p == y when gamma >= 1 and
/// throws std::domain_error at p == y when gamma < 1 (cusp).
double bcfl_grad_p(double p, double y, const BcflParams& params);

/// Cross-entropy / squared error scaled by pos_weight*y + (1-y).
double weighted_bce(double p, double y, double pos_weight);
double weighted_mse(double p, double y, double pos_weight);

/// Fraction of cells with value strictly below `threshold`. Throws
/// std::invalid_argument when there are no cells.
double estimate_alpha(std::span<const Heatmap> heatmaps, double threshold);

struct AlphaCount {
  std::size_t negatives = 0;
  std::size_t cells = 0;
  double alpha() const;
};
/// Accumulates one channel (or every channel when `channel` is empty).
void count_alpha(const Heatmap& map, double threshold, std::optional<std::size_t> channel,
                 AlphaCount& acc);

enum class LossKernel { kFocal, kQfl, kBcfl, kWeightedBce, kWeightedMse };

const char* to_string(LossKernel kernel);
std::optional<LossKernel> parse_loss_kernel(std::string_view name);

struct LossParams {
  double alpha = 0.75;
  double gamma = 2.0;
  double pos_weight = 1.0;
  // Focal loss needs hard labels: cells with target >= this are positives.
  double focal_positive_threshold = 0.5;
};

double loss_kernel(LossKernel kernel, double p, double y, const LossParams& params);

struct LossReport {
  double total = 0.0;
  std::vector<double> per_channel;
  std::size_t cell_count = 0;
};

/// Elementwise kernel, mean over each channel and over all cells.
/// Throws std::invalid_argument when shapes differ.
LossReport reduce_loss(const Heatmap& pred, const Heatmap& target, LossKernel kernel,
                       const LossParams& params);

/// Pairwise (tree) summation; fixed order, so results do not depend on
/// how callers schedule work.
double pairwise_sum(std::span<const double> values);

}  // namespace centerkit
