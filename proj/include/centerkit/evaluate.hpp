#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "centerkit/annotations.hpp"
#include "centerkit/matching.hpp"
#include "centerkit/metrics.hpp"

namespace centerkit {

enum class Aggregation { kPooled, kMacro };

struct EvalOptions {
  MatchCostParams cost;
  Aggregation aggregation = Aggregation::kPooled;
  // When set, the headline CAS terms are the ones of this band.
  std::optional<SizeBand> band;
  unsigned threads = 1;
};

/// Ground truths and predictions of one (image, category) pair.
struct EvalUnit {
  ImageInfo image;
  std::int64_t category_id = 0;
  std::vector<GroundTruthCenter> gts;
  std::vector<CenterPoint> preds;
};

/// Groups boxes and predictions into units sorted by (image_id,
/// category_id); pairs with neither are omitted. Throws ReferenceError
/// listing every prediction id that does not resolve.
std::vector<EvalUnit> build_units(const Dataset& dataset, std::span<const CenterPoint> preds);

struct ScoredUnit {
  UnitScore overall;
  std::optional<UnitScore> small;
  std::optional<UnitScore> medium;
  std::optional<UnitScore> large;
};

ScoredUnit score_eval_unit(const EvalUnit& unit, const MatchCostParams& params);

/// Full report from already scored units (in unit order).
CasReport aggregate(std::span<const ScoredUnit> scored, const Dataset& dataset,
                    const EvalOptions& options);

/// Match, score and aggregate. Throws std::invalid_argument when there is
/// nothing to evaluate.
CasReport evaluate(const Dataset& dataset, std::span<const CenterPoint> preds,
                   const EvalOptions& options);

std::string report_to_json(const CasReport& report);

}  // namespace centerkit
