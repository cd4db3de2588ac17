#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "centerkit/commands.hpp"
#include "centerkit/evaluate.hpp"
#include "centerkit/loss.hpp"
#include "centerkit/matching.hpp"
#include "centerkit/ochm.hpp"
#include "centerkit/oracle.hpp"

namespace centerkit {
namespace {

struct Check {
  std::string name;
  bool ok = true;
  double worst = 0.0;
  std::size_t cases = 0;

  void record(double err, double tol) {
    worst = std::max(worst, err);
    ++cases;
    if (!(err <= tol)) ok = false;
  }
};

Check gc_identity(std::mt19937_64& rng) {
  Check c{"gc at eta=phi=0.5 equals centerness"};
  std::uniform_real_distribution<double> d(0.01, 500.0);
  for (int k = 0; k < 20000; ++k) {
    const double l = d(rng), r = d(rng), t = d(rng), b = d(rng);
    c.record(std::fabs(gc_value(l, r, t, b, {}) - oracle::centerness_reference(l, r, t, b)), 1e-12);
  }
  return c;
}

Check gc_render(std::mt19937_64& rng) {
  Check c{"rendered gc matches pointwise reference"};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const ImageInfo image{1, 64 + static_cast<int>(u(rng) * 200), 64 + static_cast<int>(u(rng) * 200), ""};
    BoundingBox box;
    box.w = 20.0 + u(rng) * (image.width - 21.0);
    box.h = 20.0 + u(rng) * (image.height - 21.0);
    box.x = u(rng) * (image.width - box.w);
    box.y = u(rng) * (image.height - box.h);
    const GcParams params{u(rng) * 2.0, u(rng) * 2.0};
    const Heatmap map = render_gc(std::span(&box, 1), image, 4.0f, params);
    for (std::size_t i = 0; i < map.height(); ++i) {
      for (std::size_t j = 0; j < map.width(); ++j) {
        const double ref =
            oracle::gc_reference(map.sample_x(j), map.sample_y(i), box, params.eta, params.phi);
        c.record(std::fabs(map.at(0, i, j) - ref), 1e-6);
      }
    }
  }
  return c;
}

Check bcfl_decomposition(std::mt19937_64& rng) {
  Check c{"bcfl equals alpha_c * qfl and reduces to focal loss"};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20000; ++k) {
    const double p = u(rng);
    const double y = u(rng);
    const BcflParams bp{u(rng), u(rng) * 4.0};
    const double lhs = bcfl(p, y, bp);
    const double rhs = alpha_c(y, bp.alpha) * qfl(p, y, bp.gamma);
    c.record(oracle::relative_error(lhs, rhs), 1e-12);
    c.record(oracle::relative_error(bcfl(p, 1.0, bp), focal_loss(p, 1, bp.alpha, bp.gamma)), 1e-12);
    c.record(oracle::relative_error(bcfl(p, 0.0, bp), focal_loss(p, -1, bp.alpha, bp.gamma)), 1e-12);
  }
  return c;
}

Check bcfl_gradient() {
  Check c{"bcfl gradient matches central differences"};
  for (double gamma : {1.0, 2.0, 3.0, 4.0}) {
    for (double alpha : {0.5, 0.75, 0.964}) {
      for (int a = 1; a <= 19; ++a) {
        for (int b = 1; b <= 19; ++b) {
          const double p = a * 0.05;
          const double y = b * 0.05;
          if (std::fabs(p - y) < 1e-3) continue;
          const BcflParams bp{alpha, gamma};
          const double analytic = bcfl_grad_p(p, y, bp);
          const double numeric =
              oracle::finite_diff([&](double q) { return bcfl(q, y, bp); }, p, 1e-5);
          c.record(oracle::relative_error(analytic, numeric), 1e-5);
        }
      }
    }
  }
  return c;
}

Check hungarian_optimality(std::mt19937_64& rng) {
  Check c{"hungarian total equals exhaustive optimum"};
  std::uniform_int_distribution<int> side(0, 7);
  for (int k = 0; k < 1000; ++k) {
    const CostMatrix m = oracle::random_cost_matrix(rng, side(rng), side(rng));
    const double fast = hungarian(m).total_cost;
    const double slow = brute_force_assignment(m).total_cost;
    c.record(std::fabs(fast - slow), 1e-9);
  }
  return c;
}

Check cas_pipeline(std::mt19937_64& rng) {
  Check c{"cas pipeline equals exhaustive evaluation"};
  for (int k = 0; k < 300; ++k) {
    const auto inst = oracle::make_random_instance(rng);
    EvalOptions options;
    options.cost = inst.params;
    const double fast = evaluate(inst.dataset, inst.preds, options).terms.cas;
    const double slow = oracle::exhaustive_cas(inst.dataset, inst.preds, inst.params);
    c.record(std::fabs(fast - slow), 1e-9);
  }
  return c;
}

Check ochm_roundtrip(std::mt19937_64& rng) {
  Check c{"ochm encode/decode is bit exact"};
  std::uniform_int_distribution<int> dim(1, 40);
  std::uniform_real_distribution<float> value(-2.0f, 2.0f);
  for (int k = 0; k < 100; ++k) {
    Heatmap map(dim(rng) % 4 + 1, dim(rng), dim(rng), static_cast<float>(dim(rng)));
    for (float& v : map.data()) v = value(rng);
    c.record(decode_ochm(encode_ochm(map)) == map ? 0.0 : 1.0, 0.0);
  }
  return c;
}

}  // namespace

bool cmd_selftest(std::ostream& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Check checks[] = {gc_identity(rng),         gc_render(rng),
                          bcfl_decomposition(rng),  bcfl_gradient(),
                          hungarian_optimality(rng), cas_pipeline(rng),
                          ochm_roundtrip(rng)};
  bool all = true;
  for (const Check& c : checks) {
    out << (c.ok ? "PASS " : "FAIL ") << c.name << " (" << c.cases
        << " cases, worst error " << c.worst << ")\n";
    all = all && c.ok;
  }
  return all;
}

}  // namespace centerkit
