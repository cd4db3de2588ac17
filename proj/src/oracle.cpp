#include "centerkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace centerkit::oracle {
namespace {

struct RefGt {
  double cx, cy, gc, radius;
};
struct RefPred {
  double x, y, score;
};

// Minimum total cost over injective maps of the smaller side; returns the
// chosen (gt, pred) pairs.
std::vector<std::pair<int, int>> best_assignment(const std::vector<std::vector<double>>& cost,
                                                 int gts, int preds) {
  std::vector<std::pair<int, int>> best;
  if (gts == 0 || preds == 0) return best;
  const bool by_gt = gts <= preds;
  const int small = by_gt ? gts : preds;
  const int large = by_gt ? preds : gts;
  std::vector<int> pick(small, -1);
  std::vector<bool> taken(large, false);
  std::vector<int> best_pick;
  double best_cost = std::numeric_limits<double>::infinity();

  std::function<void(int, double)> recurse = [&](int depth, double acc) {
    if (depth == small) {
      if (acc < best_cost) {
        best_cost = acc;
        best_pick = pick;
      }
      return;
    }
    for (int k = 0; k < large; ++k) {
      if (taken[k]) continue;
      taken[k] = true;
      pick[depth] = k;
      recurse(depth + 1, acc + (by_gt ? cost[depth][k] : cost[k][depth]));
      taken[k] = false;
    }
  };
  recurse(0, 0.0);
  for (int d = 0; d < small; ++d) {
    best.emplace_back(by_gt ? d : best_pick[d], by_gt ? best_pick[d] : d);
  }
  return best;
}

// (cp + md) / n for one unit, and the two parts separately.
struct RefPenalty {
  double cp = 0.0;
  double md = 0.0;
};

RefPenalty unit_penalty(const std::vector<RefGt>& gts, const std::vector<RefPred>& preds,
                        double width, double height, const MatchCostParams& params) {
  const int g = static_cast<int>(gts.size());
  const int p = static_cast<int>(preds.size());
  std::vector<std::vector<double>> cost(g, std::vector<double>(p));
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < p; ++b) {
      const double nx = (gts[a].cx - preds[b].x) / width;
      const double ny = (gts[a].cy - preds[b].y) / height;
      cost[a][b] = params.lambda * std::sqrt(nx * nx + ny * ny) +
                   params.mu * std::fabs(gts[a].gc - preds[b].score);
    }
  }
  int matched = 0;
  double md = 0.0;
  for (const auto& [a, b] : best_assignment(cost, g, p)) {
    const double dx = gts[a].cx - preds[b].x;
    const double dy = gts[a].cy - preds[b].y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (dist > gts[a].radius) continue;
    ++matched;
    if (gts[a].radius > 0.0) md += dist / gts[a].radius;
  }
  const double n = std::max(g, p);
  RefPenalty out;
  out.cp = std::max(g - matched, p - matched) / n;
  out.md = md / n;
  return out;
}

}  // namespace

double gc_reference(double x, double y, const BoundingBox& box, double eta, double phi) {
  const double l = x - box.x;
  const double r = box.x + box.w - x;
  const double t = y - box.y;
  const double b = box.y + box.h - y;
  if (!(l > 0.0 && r > 0.0 && t > 0.0 && b > 0.0)) return 0.0;
  const double horizontal = l < r ? l / r : r / l;
  const double vertical = t < b ? t / b : b / t;
  return std::exp(eta * std::log(horizontal) + phi * std::log(vertical));
}

double centerness_reference(double l, double r, double t, double b) {
  return std::sqrt((std::min(l, r) / std::max(l, r)) * (std::min(t, b) / std::max(t, b)));
}

double finite_diff(const std::function<double(double)>& f, double p, double h) {
  return (f(p + h) - f(p - h)) / (2.0 * h);
}

double relative_error(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  if (scale == 0.0) return 0.0;
  return std::fabs(a - b) / scale;
}

double exhaustive_cas(const Dataset& dataset, std::span<const CenterPoint> preds,
                      const MatchCostParams& params) {
  double cp_total = 0.0;
  double md_total = 0.0;
  int units = 0;
  for (const ImageInfo& image : dataset.images) {
    for (const auto& [category, name] : dataset.categories) {
      std::vector<RefGt> gts;
      for (const BoundingBox& box : dataset.boxes) {
        if (box.image_id != image.id || box.category_id != category) continue;
        gts.push_back({box.x + 0.5 * box.w, box.y + 0.5 * box.h, 1.0,
                       0.5 * std::sqrt(box.w * box.w + box.h * box.h)});
      }
      std::vector<RefPred> ps;
      for (const CenterPoint& pt : preds) {
        if (pt.image_id == image.id && pt.category_id == category) ps.push_back({pt.x, pt.y, pt.score});
      }
      if (gts.empty() && ps.empty()) continue;
      if (gts.size() > 7 || ps.size() > 7) {
        throw std::invalid_argument("exhaustive_cas: more than 7 points on one side");
      }
      const RefPenalty pen = unit_penalty(gts, ps, image.width, image.height, params);
      cp_total += pen.cp;
      md_total += pen.md;
      ++units;
    }
  }
  if (units == 0) throw std::invalid_argument("exhaustive_cas: no units");
  return 1.0 - cp_total / units - md_total / units;
}

RandomInstance make_random_instance(std::mt19937_64& rng, int max_per_side) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, max_per_side);
  std::uniform_int_distribution<int> small_count(1, 2);

  RandomInstance inst;
  const int images = small_count(rng);
  const int categories = small_count(rng);
  for (int c = 1; c <= categories; ++c) inst.dataset.categories[c] = "c" + std::to_string(c);
  for (int i = 1; i <= images; ++i) {
    ImageInfo im;
    im.id = i;
    im.width = 40 + static_cast<int>(unit(rng) * 360);
    im.height = 40 + static_cast<int>(unit(rng) * 360);
    inst.dataset.images.push_back(im);
    for (int c = 1; c <= categories; ++c) {
      const int ngt = count(rng);
      const int npred = count(rng);
      std::vector<BoundingBox> boxes;
      for (int k = 0; k < ngt; ++k) {
        BoundingBox b;
        b.w = 2.0 + unit(rng) * (im.width / 2.0);
        b.h = 2.0 + unit(rng) * (im.height / 2.0);
        b.x = unit(rng) * (im.width - b.w);
        b.y = unit(rng) * (im.height - b.h);
        b.image_id = i;
        b.category_id = c;
        boxes.push_back(b);
        inst.dataset.boxes.push_back(b);
      }
      for (int k = 0; k < npred; ++k) {
        CenterPoint p;
        p.image_id = i;
        p.category_id = c;
        p.score = unit(rng);
        if (!boxes.empty() && unit(rng) < 0.7) {
          // Near a ground-truth center, sometimes beyond its radius.
          const BoundingBox& b = boxes[static_cast<std::size_t>(unit(rng) * boxes.size())];
          const double r = box_diagonal_threshold(b) * 1.3 * unit(rng);
          const double theta = 2.0 * std::numbers::pi * unit(rng);
          p.x = std::clamp(b.x + b.w / 2 + r * std::cos(theta), 0.0, double(im.width));
          p.y = std::clamp(b.y + b.h / 2 + r * std::sin(theta), 0.0, double(im.height));
        } else {
          p.x = unit(rng) * im.width;
          p.y = unit(rng) * im.height;
        }
        inst.preds.push_back(p);
      }
    }
  }
  if (inst.dataset.boxes.empty() && inst.preds.empty()) {
    const ImageInfo& im = inst.dataset.images.front();
    inst.dataset.boxes.push_back({0.25 * im.width, 0.25 * im.height, 0.5 * im.width,
                                  0.5 * im.height, 1, im.id});
  }
  if (unit(rng) < 0.5) {
    inst.params = {0.2 + 1.8 * unit(rng), 0.2 + 1.8 * unit(rng)};
  }
  return inst;
}

CostMatrix random_cost_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> entry(0.0, 10.0);
  CostMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = entry(rng);
  }
  return m;
}

}  // namespace centerkit::oracle
