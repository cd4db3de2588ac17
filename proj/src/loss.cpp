#include "centerkit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace centerkit {
namespace {

// -[(1-y) log(1-p) + y log p] on a clamped p.
double cross_entropy(double p, double y) {
  const double pc = clamp_probability(p);
  return -((1.0 - y) * std::log1p(-pc) + y * std::log(pc));
}

double pairwise_sum_range(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += v[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_range(v, half) + pairwise_sum_range(v + half, n - half);
}

}  // namespace

double clamp_probability(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

double focal_loss(double p, int y, double alpha, double gamma) {
  const double pc = clamp_probability(p);
  const bool positive = y == 1;
  const double at = positive ? alpha : 1.0 - alpha;
  // 1 - p_t and log p_t, without forming 1 - p for negatives.
  const double miss = positive ? 1.0 - pc : pc;
  const double log_pt = positive ? std::log(pc) : std::log1p(-pc);
  return -at * std::pow(miss, gamma) * log_pt;
}

double qfl(double p, double y, double gamma) {
  const double gap = std::abs(y - p);
  if (gap == 0.0 && gamma > 0.0) return 0.0;
  return std::pow(gap, gamma) * cross_entropy(p, y);
}

double bcfl(double p, double y, const BcflParams& params) {
  return alpha_c(y, params.alpha) * qfl(p, y, params.gamma);
}

double bcfl_grad_p(double p, double y, const BcflParams& params) {
  if (!(p > kProbEpsilon && p < 1.0 - kProbEpsilon)) {
    throw std::domain_error("bcfl_grad_p: p outside the open clamp interval");
  }
  const double gamma = params.gamma;
  const double diff = p - y;
  if (diff == 0.0) {
    if (gamma < 1.0) throw std::domain_error("bcfl_grad_p: non-differentiable at p == y");
    return 0.0;
  }
  const double gap = std::abs(diff);
  const double sign = diff > 0.0 ? 1.0 : -1.0;
  // d/dp [g^gamma * B] = gamma g^(gamma-1) sign(p-y) B + g^gamma (p-y) / (p(1-p))
  const double ce = cross_entropy(p, y);
  const double dce = diff / (p * (1.0 - p));
  const double d_mod = gamma * std::pow(gap, gamma - 1.0) * sign;
  return alpha_c(y, params.alpha) * (d_mod * ce + std::pow(gap, gamma) * dce);
}

double weighted_bce(double p, double y, double pos_weight) {
  return (pos_weight * y + (1.0 - y)) * cross_entropy(p, y);
}

double weighted_mse(double p, double y, double pos_weight) {
  const double d = p - y;
  return (pos_weight * y + (1.0 - y)) * d * d;
}

double AlphaCount::alpha() const {
  if (cells == 0) throw std::invalid_argument("estimate_alpha: no cells");
  return static_cast<double>(negatives) / static_cast<double>(cells);
}

void count_alpha(const Heatmap& map, double threshold, std::optional<std::size_t> channel,
                 AlphaCount& acc) {
  auto count_plane = [&](std::span<const float> plane) {
    for (float v : plane) {
      if (static_cast<double>(v) < threshold) ++acc.negatives;
    }
    acc.cells += plane.size();
  };
  if (channel) {
    if (*channel >= map.channels()) throw std::out_of_range("channel index out of range");
    count_plane(map.channel(*channel));
  } else {
    count_plane(map.data());
  }
}

double estimate_alpha(std::span<const Heatmap> heatmaps, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("estimate_alpha: threshold must lie in [0, 1]");
  }
  AlphaCount acc;
  for (const Heatmap& map : heatmaps) count_alpha(map, threshold, std::nullopt, acc);
  return acc.alpha();
}

const char* to_string(LossKernel kernel) {
  switch (kernel) {
    case LossKernel::kFocal: return "fl";
    case LossKernel::kQfl: return "qfl";
    case LossKernel::kBcfl: return "bcfl";
    case LossKernel::kWeightedBce: return "wbce";
    case LossKernel::kWeightedMse: return "wmse";
  }
  return "?";
}

std::optional<LossKernel> parse_loss_kernel(std::string_view name) {
  if (name == "fl") return LossKernel::kFocal;
  if (name == "qfl") return LossKernel::kQfl;
  if (name == "bcfl") return LossKernel::kBcfl;
  if (name == "wbce") return LossKernel::kWeightedBce;
  if (name == "wmse") return LossKernel::kWeightedMse;
  return std::nullopt;
}

double loss_kernel(LossKernel kernel, double p, double y, const LossParams& params) {
  switch (kernel) {
    case LossKernel::kFocal:
      return focal_loss(p, y >= params.focal_positive_threshold ? 1 : -1, params.alpha,
                        params.gamma);
    case LossKernel::kQfl: return qfl(p, y, params.gamma);
    case LossKernel::kBcfl: return bcfl(p, y, {params.alpha, params.gamma});
    case LossKernel::kWeightedBce: return weighted_bce(p, y, params.pos_weight);
    case LossKernel::kWeightedMse: return weighted_mse(p, y, params.pos_weight);
  }
  throw std::invalid_argument("unknown loss kernel");
}

LossReport reduce_loss(const Heatmap& pred, const Heatmap& target, LossKernel kernel,
                       const LossParams& params) {
  if (pred.channels() != target.channels() || pred.height() != target.height() ||
      pred.width() != target.width()) {
    throw std::invalid_argument("reduce_loss: prediction and target shapes differ");
  }
  LossReport report;
  const std::size_t plane = pred.plane_size();
  std::vector<double> values(pred.size());
  for (std::size_t c = 0; c < pred.channels(); ++c) {
    auto p = pred.channel(c);
    auto y = target.channel(c);
    double* out = values.data() + c * plane;
    for (std::size_t k = 0; k < plane; ++k) out[k] = loss_kernel(kernel, p[k], y[k], params);
    report.per_channel.push_back(plane == 0 ? 0.0 : pairwise_sum({out, plane}) / plane);
  }
  report.cell_count = values.size();
  report.total = values.empty() ? 0.0 : pairwise_sum(values) / values.size();
  return report;
}

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_range(values.data(), values.size());
}

}  // namespace centerkit
