#pragma once

// Brute-force reference implementations. They deliberately share no code
// with the production paths they are used to check.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "centerkit/annotations.hpp"
#include "centerkit/matching.hpp"
#include "centerkit/peaks.hpp"

namespace centerkit::oracle {

/// Generalized Centerness of (x, y) in `box` evaluated via exp/log; 0 unless
/// the point lies strictly inside the box.
double gc_reference(double x, double y, const BoundingBox& box, double eta, double phi);

/// FCOS centerness sqrt(min(l,r)/max(l,r) * min(t,b)/max(t,b)).
double centerness_reference(double l, double r, double t, double b);

/// Central difference (f(p+h) - f(p-h)) / 2h.
double finite_diff(const std::function<double(double)>& f, double p, double h);

/// |a - b| / max(|a|, |b|), 0 when both are 0.
double relative_error(double a, double b);

/// CAS over every (image, category) pair found by exhaustive search over
/// injective assignments. At most 7 points per side in any unit; throws
/// std::invalid_argument otherwise.
double exhaustive_cas(const Dataset& dataset, std::span<const CenterPoint> preds,
                      const MatchCostParams& params);

/// Random small evaluation problem: a handful of images and categories,
/// up to `max_per_side` boxes and predictions per (image, category).
struct RandomInstance {
  Dataset dataset;
  std::vector<CenterPoint> preds;
  MatchCostParams params;
};
RandomInstance make_random_instance(std::mt19937_64& rng, int max_per_side = 5);

/// Random cost matrix with entries uniform in [0, 10).
CostMatrix random_cost_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols);

}  // namespace centerkit::oracle
