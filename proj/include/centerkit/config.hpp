#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "centerkit/annotations.hpp"
#include "centerkit/evaluate.hpp"
#include "centerkit/heatmap.hpp"
#include "centerkit/loss.hpp"
#include "centerkit/matching.hpp"
#include "centerkit/parallel.hpp"
#include "centerkit/peaks.hpp"

namespace centerkit {

enum class GtKind { kGc, kGaussian, kEllipse };

const char* to_string(GtKind kind);
std::optional<GtKind> parse_gt_kind(std::string_view name);
std::optional<Aggregation> parse_aggregation(std::string_view name);

/// Every tunable of the command-line pipeline. Defaults: stride 4,
/// eta = phi = 0.5, gamma 2, alpha 0.984, peak threshold 0.5, lambda = mu = 1.
struct RunConfig {
  float stride = 4.0f;
  GcParams gc;
  GtKind gt = GtKind::kGc;
  double sigma = 2.0;
  PeakParams peaks;
  MatchCostParams cost;
  double alpha = 0.984;
  double gamma = 2.0;
  double pos_weight = 1.0;
  double fl_positive = 0.5;
  double alpha_threshold = 0.6;
  Aggregation aggregation = Aggregation::kPooled;
  std::optional<SizeBand> band;
  unsigned threads = default_thread_count();
  // Categories rendered by `gen` / `alpha`; empty means all.
  std::vector<std::int64_t> categories;

  LossParams loss_params() const { return {alpha, gamma, pos_weight, fl_positive}; }
  EvalOptions eval_options() const { return {cost, aggregation, band, threads}; }
};

/// Overlays the keys present in a JSON object onto `config`. Keys mirror
/// the long flag names with '-' replaced by '_' (stride, eta, phi, gt,
/// sigma, threshold, min_distance, window_radius, lambda, mu, alpha, gamma,
/// pos_weight, fl_positive, alpha_threshold, aggregation, band, threads,
/// categories). Unknown keys or bad values throw ParseError.
void apply_config_json(RunConfig& config, std::string_view json_text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Throws std::invalid_argument if any field is outside its domain.
void validate(const RunConfig& config);

}  // namespace centerkit
