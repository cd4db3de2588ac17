#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "centerkit/matching.hpp"

namespace centerkit {

/// Penalties of one evaluation unit, i.e. one (image, category) pair.
struct UnitScore {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  // Sum over matched pairs of pixel distance / ground-truth radius.
  double md_sum = 0.0;
  // max(#unmatched gt, #unmatched pred), or #unmatched gt in a banded unit.
  std::size_t cp = 0;
  // Normaliser: max(#gt, #pred), or #in-band gt in a banded unit.
  std::size_t n = 0;
  std::size_t matched = 0;
  // Matched predictions that fall inside their ground-truth box.
  std::size_t tp = 0;
  std::size_t num_gt = 0;
  std::size_t num_pred = 0;

  double cp_ratio() const { return n == 0 ? 0.0 : static_cast<double>(cp) / n; }
  double md_ratio() const { return n == 0 ? 0.0 : md_sum / n; }
  double penalty() const { return cp_ratio() + md_ratio(); }
};

UnitScore score_unit(const MatchSet& match, std::span<const GroundTruthCenter> gts,
                     std::span<const CenterPoint> preds, std::int64_t image_id = 0,
                     std::int64_t category_id = 0);

/// Restricts an already matched unit to ground truths of one size band:
/// only pairs whose ground truth is in band count, CP counts unmatched
/// in-band ground truths only, and n is the in-band ground-truth count.
/// Returns nullopt when the unit has no ground truth in the band.
std::optional<UnitScore> score_unit_in_band(const MatchSet& match,
                                            std::span<const GroundTruthCenter> gts,
                                            std::span<const CenterPoint> preds, SizeBand band,
                                            std::int64_t image_id = 0,
                                            std::int64_t category_id = 0);

struct CasTerms {
  double cas = 0.0;
  double cp_term = 0.0;
  double md_term = 0.0;
};

/// cp_term and md_term are unit means of cp/n and md_sum/n; cas = 1 - both.
/// Units are summed in the order given. Throws std::invalid_argument when empty.
CasTerms cas(std::span<const UnitScore> units);

/// cas over banded units, or nullopt when there are none.
std::optional<CasTerms> cas_stratified(std::span<const UnitScore> banded_units);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrecisionRecall precision_recall_f1(std::span<const UnitScore> units);

struct CategoryScore {
  std::int64_t category_id = 0;
  std::string name;
  CasTerms terms;
  PrecisionRecall prf;
  std::size_t units = 0;
};

struct CasReport {
  CasTerms terms;
  std::optional<double> cas_s;
  std::optional<double> cas_m;
  std::optional<double> cas_l;
  PrecisionRecall prf;
  std::size_t units = 0;
  std::vector<CategoryScore> per_category;
};

}  // namespace centerkit
