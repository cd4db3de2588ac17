#include "centerkit/evaluate.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "centerkit/errors.hpp"
#include "centerkit/parallel.hpp"
#include "json.hpp"

namespace centerkit {
namespace {

using UnitKey = std::pair<std::int64_t, std::int64_t>;

std::optional<UnitScore> ScoredUnit::*band_member(SizeBand band) {
  switch (band) {
    case SizeBand::kSmall: return &ScoredUnit::small;
    case SizeBand::kMedium: return &ScoredUnit::medium;
    case SizeBand::kLarge: return &ScoredUnit::large;
  }
  return &ScoredUnit::small;
}

std::vector<UnitScore> collect_band(std::span<const ScoredUnit> scored, SizeBand band) {
  std::vector<UnitScore> out;
  auto member = band_member(band);
  for (const ScoredUnit& s : scored) {
    if (s.*member) out.push_back(*(s.*member));
  }
  return out;
}

std::vector<UnitScore> collect_overall(std::span<const ScoredUnit> scored) {
  std::vector<UnitScore> out;
  out.reserve(scored.size());
  for (const ScoredUnit& s : scored) out.push_back(s.overall);
  return out;
}

std::map<std::int64_t, std::vector<UnitScore>> by_category(std::span<const UnitScore> units) {
  std::map<std::int64_t, std::vector<UnitScore>> groups;
  for (const UnitScore& u : units) groups[u.category_id].push_back(u);
  return groups;
}

CasTerms mean_terms(const std::vector<CasTerms>& terms) {
  CasTerms out;
  for (const CasTerms& t : terms) {
    out.cp_term += t.cp_term;
    out.md_term += t.md_term;
  }
  const double count = static_cast<double>(terms.size());
  out.cp_term /= count;
  out.md_term /= count;
  out.cas = 1.0 - out.cp_term - out.md_term;
  return out;
}

// Pooled: mean over units. Macro: mean over categories of per-category means.
std::optional<CasTerms> aggregate_terms(std::span<const UnitScore> units, Aggregation mode) {
  if (units.empty()) return std::nullopt;
  if (mode == Aggregation::kPooled) return cas(units);
  std::vector<CasTerms> per_category;
  for (const auto& [category, group] : by_category(units)) per_category.push_back(cas(group));
  return mean_terms(per_category);
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

std::vector<EvalUnit> build_units(const Dataset& dataset, std::span<const CenterPoint> preds) {
  std::map<UnitKey, EvalUnit> units;
  auto unit_for = [&](std::int64_t image_id, std::int64_t category_id) -> EvalUnit& {
    auto [it, inserted] = units.try_emplace({image_id, category_id});
    if (inserted) {
      it->second.image = *dataset.find_image(image_id);
      it->second.category_id = category_id;
    }
    return it->second;
  };

  for (const BoundingBox& box : dataset.boxes) {
    unit_for(box.image_id, box.category_id).gts.push_back(GroundTruthCenter::from_box(box));
  }

  std::set<std::int64_t> bad_images;
  std::set<std::int64_t> bad_categories;
  for (const CenterPoint& p : preds) {
    const bool image_ok = dataset.find_image(p.image_id) != nullptr;
    const bool category_ok = dataset.has_category(p.category_id);
    if (!image_ok) bad_images.insert(p.image_id);
    if (!category_ok) bad_categories.insert(p.category_id);
    if (image_ok && category_ok) unit_for(p.image_id, p.category_id).preds.push_back(p);
  }
  if (!bad_images.empty() || !bad_categories.empty()) {
    std::ostringstream msg;
    std::vector<std::int64_t> ids;
    msg << "predictions reference unknown ids:";
    if (!bad_images.empty()) {
      msg << " image_id";
      for (auto id : bad_images) {
        msg << ' ' << id;
        ids.push_back(id);
      }
    }
    if (!bad_categories.empty()) {
      msg << (bad_images.empty() ? "" : ";") << " category_id";
      for (auto id : bad_categories) {
        msg << ' ' << id;
        ids.push_back(id);
      }
    }
    throw ReferenceError(msg.str(), std::move(ids));
  }

  std::vector<EvalUnit> out;
  out.reserve(units.size());
  for (auto& [key, unit] : units) out.push_back(std::move(unit));
  return out;
}

ScoredUnit score_eval_unit(const EvalUnit& unit, const MatchCostParams& params) {
  const MatchSet match = match_and_refine(unit.gts, unit.preds, params, unit.image);
  ScoredUnit scored;
  scored.overall = score_unit(match, unit.gts, unit.preds, unit.image.id, unit.category_id);
  scored.small = score_unit_in_band(match, unit.gts, unit.preds, SizeBand::kSmall,
                                    unit.image.id, unit.category_id);
  scored.medium = score_unit_in_band(match, unit.gts, unit.preds, SizeBand::kMedium,
                                     unit.image.id, unit.category_id);
  scored.large = score_unit_in_band(match, unit.gts, unit.preds, SizeBand::kLarge,
                                    unit.image.id, unit.category_id);
  return scored;
}

CasReport aggregate(std::span<const ScoredUnit> scored, const Dataset& dataset,
                    const EvalOptions& options) {
  if (scored.empty()) throw std::invalid_argument("nothing to evaluate: no ground truth or predictions");
  const std::vector<UnitScore> overall = collect_overall(scored);
  const std::vector<UnitScore> small = collect_band(scored, SizeBand::kSmall);
  const std::vector<UnitScore> medium = collect_band(scored, SizeBand::kMedium);
  const std::vector<UnitScore> large = collect_band(scored, SizeBand::kLarge);

  CasReport report;
  report.units = overall.size();
  report.prf = precision_recall_f1(overall);
  if (auto t = aggregate_terms(small, options.aggregation)) report.cas_s = t->cas;
  if (auto t = aggregate_terms(medium, options.aggregation)) report.cas_m = t->cas;
  if (auto t = aggregate_terms(large, options.aggregation)) report.cas_l = t->cas;

  if (options.band) {
    const auto& banded = *options.band == SizeBand::kSmall    ? small
                         : *options.band == SizeBand::kMedium ? medium
                                                              : large;
    auto terms = aggregate_terms(banded, options.aggregation);
    if (!terms) {
      throw std::invalid_argument(std::string("no ground truth in band ") +
                                  to_string(*options.band));
    }
    report.terms = *terms;
  } else {
    report.terms = *aggregate_terms(overall, options.aggregation);
  }

  for (const auto& [category, group] : by_category(overall)) {
    CategoryScore cs;
    cs.category_id = category;
    if (auto it = dataset.categories.find(category); it != dataset.categories.end()) {
      cs.name = it->second;
    }
    cs.terms = cas(group);
    cs.prf = precision_recall_f1(group);
    cs.units = group.size();
    report.per_category.push_back(std::move(cs));
  }
  return report;
}

CasReport evaluate(const Dataset& dataset, std::span<const CenterPoint> preds,
                   const EvalOptions& options) {
  const std::vector<EvalUnit> units = build_units(dataset, preds);
  std::vector<ScoredUnit> scored(units.size());
  parallel_for(units.size(), options.threads,
               [&](std::size_t i) { scored[i] = score_eval_unit(units[i], options.cost); });
  return aggregate(scored, dataset, options);
}

std::string report_to_json(const CasReport& report) {
  nlohmann::ordered_json j;
  j["cas"] = report.terms.cas;
  j["cp"] = report.terms.cp_term;
  j["md"] = report.terms.md_term;
  j["cas_s"] = optional_number(report.cas_s);
  j["cas_m"] = optional_number(report.cas_m);
  j["cas_l"] = optional_number(report.cas_l);
  j["precision"] = report.prf.precision;
  j["recall"] = report.prf.recall;
  j["f1"] = report.prf.f1;
  j["units"] = report.units;
  auto& cats = j["per_category"] = nlohmann::ordered_json::array();
  for (const CategoryScore& cs : report.per_category) {
    nlohmann::ordered_json c;
    c["category_id"] = cs.category_id;
    c["name"] = cs.name;
    c["cas"] = cs.terms.cas;
    c["cp"] = cs.terms.cp_term;
    c["md"] = cs.terms.md_term;
    c["precision"] = cs.prf.precision;
    c["recall"] = cs.prf.recall;
    c["f1"] = cs.prf.f1;
    c["units"] = cs.units;
    cats.push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

}  // namespace centerkit
