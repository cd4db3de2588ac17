#include "centerkit/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace centerkit {
namespace {

double normalized_distance(const MatchedPair& pair, const GroundTruthCenter& gt) {
  // A zero radius only survives refinement with a zero distance: 0/0 := 0.
  if (gt.radius <= 0.0) return 0.0;
  return pair.distance / gt.radius;
}

}  // namespace

UnitScore score_unit(const MatchSet& match, std::span<const GroundTruthCenter> gts,
                     std::span<const CenterPoint> preds, std::int64_t image_id,
                     std::int64_t category_id) {
  UnitScore unit;
  unit.image_id = image_id;
  unit.category_id = category_id;
  unit.num_gt = gts.size();
  unit.num_pred = preds.size();
  unit.n = std::max(gts.size(), preds.size());
  unit.matched = match.pairs.size();
  unit.cp = std::max(match.unmatched_gt.size(), match.unmatched_pred.size());
  for (const MatchedPair& pair : match.pairs) {
    const GroundTruthCenter& gt = gts[pair.gt];
    unit.md_sum += normalized_distance(pair, gt);
    if (box_contains(gt.box, preds[pair.pred].x, preds[pair.pred].y)) ++unit.tp;
  }
  return unit;
}

std::optional<UnitScore> score_unit_in_band(const MatchSet& match,
                                            std::span<const GroundTruthCenter> gts,
                                            std::span<const CenterPoint> preds, SizeBand band,
                                            std::int64_t image_id, std::int64_t category_id) {
  UnitScore unit;
  unit.image_id = image_id;
  unit.category_id = category_id;
  unit.num_pred = preds.size();
  for (const GroundTruthCenter& gt : gts) {
    if (gt.band == band) ++unit.num_gt;
  }
  if (unit.num_gt == 0) return std::nullopt;
  unit.n = unit.num_gt;
  for (std::size_t g : match.unmatched_gt) {
    if (gts[g].band == band) ++unit.cp;
  }
  for (const MatchedPair& pair : match.pairs) {
    const GroundTruthCenter& gt = gts[pair.gt];
    if (gt.band != band) continue;
    ++unit.matched;
    unit.md_sum += normalized_distance(pair, gt);
    if (box_contains(gt.box, preds[pair.pred].x, preds[pair.pred].y)) ++unit.tp;
  }
  return unit;
}

CasTerms cas(std::span<const UnitScore> units) {
  if (units.empty()) throw std::invalid_argument("cas: no evaluation units");
  double cp_sum = 0.0;
  double md_sum = 0.0;
  for (const UnitScore& u : units) {
    cp_sum += u.cp_ratio();
    md_sum += u.md_ratio();
  }
  const double count = static_cast<double>(units.size());
  CasTerms terms;
  terms.cp_term = cp_sum / count;
  terms.md_term = md_sum / count;
  terms.cas = 1.0 - terms.cp_term - terms.md_term;
  return terms;
}

std::optional<CasTerms> cas_stratified(std::span<const UnitScore> banded_units) {
  if (banded_units.empty()) return std::nullopt;
  return cas(banded_units);
}

PrecisionRecall precision_recall_f1(std::span<const UnitScore> units) {
  std::size_t tp = 0;
  std::size_t preds = 0;
  std::size_t gts = 0;
  for (const UnitScore& u : units) {
    tp += u.tp;
    preds += u.num_pred;
    gts += u.num_gt;
  }
  PrecisionRecall out;
  out.precision = preds == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(preds);
  out.recall = gts == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gts);
  const double denom = out.precision + out.recall;
  out.f1 = denom == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / denom;
  return out;
}

}  // namespace centerkit
