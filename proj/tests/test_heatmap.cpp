#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "centerkit/heatmap.hpp"
#include "centerkit/oracle.hpp"

using namespace centerkit;

namespace {

const ImageInfo kImage100{1, 100, 100, ""};

BoundingBox random_box(std::mt19937_64& rng, const ImageInfo& image, double min_side) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BoundingBox b;
  b.w = min_side + u(rng) * (image.width - min_side);
  b.h = min_side + u(rng) * (image.height - min_side);
  b.x = u(rng) * (image.width - b.w);
  b.y = u(rng) * (image.height - b.h);
  return b;
}

}  // namespace

TEST(GcValue, Examples) {
  EXPECT_DOUBLE_EQ(gc_value(2, 2, 3, 3, {0.5, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(gc_value(2, 2, 3, 3, {1.7, 0.2}), 1.0);
  EXPECT_NEAR(gc_value(1, 3, 1, 3, {0.5, 0.5}), 1.0 / 3.0, 1e-15);
}

TEST(GcValue, ZeroExponentFactorIsOne) {
  EXPECT_DOUBLE_EQ(gc_value(0, 4, 1, 1, {0.0, 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(gc_value(1, 3, 0, 2, {1.0, 0.0}), 1.0 / 3.0);
}

TEST(GcValue, EdgePointIsZero) { EXPECT_DOUBLE_EQ(gc_value(0, 4, 1, 1, {0.5, 0.5}), 0.0); }

TEST(GcValue, DomainErrors) {
  EXPECT_THROW(gc_value(0, 0, 1, 1, {}), std::domain_error);
  EXPECT_THROW(gc_value(1, 1, 0, 0, {}), std::domain_error);
  EXPECT_THROW(gc_value(-1, 2, 1, 1, {}), std::domain_error);
}

TEST(GcValueProperty, EqualsCenternessAtHalfExponents) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(1e-3, 1e3);
  for (int k = 0; k < 100000; ++k) {
    const double l = d(rng), r = d(rng), t = d(rng), b = d(rng);
    ASSERT_NEAR(gc_value(l, r, t, b, {}), oracle::centerness_reference(l, r, t, b), 1e-12);
  }
}

TEST(GcValueProperty, LargerExponentNeverIncreasesValue) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> d(0.1, 100.0);
  std::uniform_real_distribution<double> e(0.0, 3.0);
  for (int k = 0; k < 20000; ++k) {
    const double l = d(rng), r = d(rng), t = d(rng), b = d(rng);
    const double eta = e(rng), phi = e(rng), step = e(rng);
    const double base = gc_value(l, r, t, b, {eta, phi});
    EXPECT_LE(gc_value(l, r, t, b, {eta + step, phi}), base + 1e-15);
    EXPECT_LE(gc_value(l, r, t, b, {eta, phi + step}), base + 1e-15);
  }
}

TEST(RenderGc, GridShapeAndSamplePoints) {
  const ImageInfo image{1, 101, 37, ""};
  const Heatmap map = Heatmap::for_image(image, 4.0f, 2);
  EXPECT_EQ(map.channels(), 2u);
  EXPECT_EQ(map.width(), 26u);
  EXPECT_EQ(map.height(), 10u);
  EXPECT_DOUBLE_EQ(map.sample_x(0), 2.0);
  EXPECT_DOUBLE_EQ(map.sample_y(3), 14.0);
}

TEST(RenderGc, WholeImageBoxCoversEveryCell) {
  const BoundingBox box{0, 0, 100, 100, 1, 1};
  const Heatmap map = render_gc(std::span(&box, 1), kImage100, 4.0f, {});
  ASSERT_EQ(map.width(), 25u);
  const auto values = map.channel(0);
  EXPECT_GT(*std::min_element(values.begin(), values.end()), 0.0f);
  // Cell 12 samples x = 50, the box center.
  EXPECT_FLOAT_EQ(map.at(0, 12, 12), 1.0f);
  EXPECT_FLOAT_EQ(*std::max_element(values.begin(), values.end()), 1.0f);
}

TEST(RenderGc, CenterSampleIsOne) {
  // Box centered on the sample point of cell (5, 5): (22, 22).
  const BoundingBox box{12, 12, 20, 20, 1, 1};
  const Heatmap map = render_gc(std::span(&box, 1), kImage100, 4.0f, {});
  EXPECT_FLOAT_EQ(map.at(0, 5, 5), 1.0f);
  EXPECT_FLOAT_EQ(map.at(0, 0, 0), 0.0f);
}

TEST(RenderGc, OverlapKeepsMaximum) {
  const BoundingBox boxes[] = {{10, 10, 40, 40, 1, 1}, {30, 30, 40, 40, 1, 1}};
  const Heatmap both = render_gc(boxes, kImage100, 4.0f, {});
  const Heatmap a = render_gc(std::span(boxes, 1), kImage100, 4.0f, {});
  const Heatmap b = render_gc(std::span(boxes + 1, 1), kImage100, 4.0f, {});
  EXPECT_EQ(both, merge_max(a, b));
}

TEST(RenderGc, SubCellBoxMarksNearestCell) {
  const BoundingBox box{10, 10, 1, 1, 1, 1};
  const Heatmap map = render_gc(std::span(&box, 1), kImage100, 4.0f, {});
  std::size_t ones = 0, nonzero = 0;
  for (std::size_t i = 0; i < map.height(); ++i) {
    for (std::size_t j = 0; j < map.width(); ++j) {
      if (map.at(0, i, j) != 0.0f) ++nonzero;
      if (map.at(0, i, j) == 1.0f) {
        ++ones;
        // Center (10.5, 10.5) lies in cell floor(10.5 / 4) = 2.
        EXPECT_EQ(i, 2u);
        EXPECT_EQ(j, 2u);
      }
    }
  }
  EXPECT_EQ(ones, 1u);
  EXPECT_EQ(nonzero, 1u);
}

TEST(RenderGc, EmptyBoxListIsAllZero) {
  const Heatmap map = render_gc({}, kImage100, 4.0f, {});
  for (float v : map.data()) EXPECT_EQ(v, 0.0f);
}

TEST(RenderGcProperty, MatchesPointwiseReference) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> e(0.0, 2.5);
  for (int k = 0; k < 300; ++k) {
    const BoundingBox box = random_box(rng, kImage100, 10.0);
    const GcParams params{e(rng), e(rng)};
    const Heatmap map = render_gc(std::span(&box, 1), kImage100, 4.0f, params);
    for (std::size_t i = 0; i < map.height(); ++i) {
      for (std::size_t j = 0; j < map.width(); ++j) {
        const double ref =
            oracle::gc_reference(map.sample_x(j), map.sample_y(i), box, params.eta, params.phi);
        ASSERT_NEAR(map.at(0, i, j), ref, 1e-6);
      }
    }
  }
}

TEST(RenderGcProperty, ValuesInUnitInterval) {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 200; ++k) {
    std::vector<BoundingBox> boxes;
    for (int n = 0; n < 4; ++n) boxes.push_back(random_box(rng, kImage100, 0.5));
    const Heatmap map = render_gc(boxes, kImage100, 4.0f, {});
    for (float v : map.data()) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
}

TEST(RenderGcProperty, UnimodalAlongRowsAndColumns) {
  std::mt19937_64 rng(25);
  for (int k = 0; k < 200; ++k) {
    const BoundingBox box = random_box(rng, kImage100, 12.0);
    const Heatmap map = render_gc(std::span(&box, 1), kImage100, 2.0f, {0.7, 1.3});
    auto unimodal = [](const std::vector<float>& seq) {
      std::size_t i = 0;
      while (i + 1 < seq.size() && seq[i + 1] >= seq[i]) ++i;
      while (i + 1 < seq.size() && seq[i + 1] <= seq[i]) ++i;
      return i + 1 >= seq.size();
    };
    for (std::size_t i = 0; i < map.height(); ++i) {
      std::vector<float> row;
      for (std::size_t j = 0; j < map.width(); ++j) row.push_back(map.at(0, i, j));
      ASSERT_TRUE(unimodal(row)) << "row " << i;
    }
    for (std::size_t j = 0; j < map.width(); ++j) {
      std::vector<float> col;
      for (std::size_t i = 0; i < map.height(); ++i) col.push_back(map.at(0, i, j));
      ASSERT_TRUE(unimodal(col)) << "column " << j;
    }
  }
}

TEST(RenderGcProperty, OrderOfBoxesIrrelevant) {
  std::mt19937_64 rng(26);
  for (int k = 0; k < 100; ++k) {
    std::vector<BoundingBox> boxes;
    for (int n = 0; n < 5; ++n) boxes.push_back(random_box(rng, kImage100, 1.0));
    const Heatmap a = render_gc(boxes, kImage100, 4.0f, {});
    std::shuffle(boxes.begin(), boxes.end(), rng);
    EXPECT_EQ(a, render_gc(boxes, kImage100, 4.0f, {}));
  }
}

TEST(RenderGaussian, Examples) {
  // Grid position of a center is c / stride - 0.5, so (22, 22) sits on cell (5, 5).
  const Point2 center{22.0, 22.0};
  const Heatmap map = render_gaussian(std::span(&center, 1), kImage100, 4.0f, 2.0);
  EXPECT_FLOAT_EQ(map.at(0, 5, 5), 1.0f);
  // Cell (5, 7) is two cells away: exp(-4 / 8).
  EXPECT_NEAR(map.at(0, 5, 7), std::exp(-0.5), 1e-7);

  // A cell at distance sigma * sqrt(2 ln 2) has value 0.5: with sigma = 1/sqrt(2 ln 2)
  // that distance is one cell.
  const double sigma = 1.0 / std::sqrt(2.0 * std::log(2.0));
  const Heatmap half = render_gaussian(std::span(&center, 1), kImage100, 4.0f, sigma);
  EXPECT_NEAR(half.at(0, 5, 6), 0.5, 1e-7);
  EXPECT_NEAR(half.at(0, 4, 5), 0.5, 1e-7);
}

TEST(RenderGaussian, TwoCentersEqualMaxOfSingles) {
  const Point2 centers[] = {{10, 10}, {90, 80}};
  const Heatmap both = render_gaussian(centers, kImage100, 4.0f, 2.0);
  const Heatmap a = render_gaussian(std::span(centers, 1), kImage100, 4.0f, 2.0);
  const Heatmap b = render_gaussian(std::span(centers + 1, 1), kImage100, 4.0f, 2.0);
  EXPECT_EQ(both, merge_max(a, b));
}

TEST(RenderGaussian, RejectsNonPositiveSigma) {
  const Point2 c{1, 1};
  EXPECT_THROW(render_gaussian(std::span(&c, 1), kImage100, 4.0f, 0.0), std::invalid_argument);
}

TEST(RenderEllipse, Examples) {
  // Box centered on the sample point of cell (5, 5) with w = 16, h = 8.
  const BoundingBox box{14, 18, 16, 8, 1, 1};
  const Heatmap map = render_ellipse(std::span(&box, 1), kImage100, 4.0f);
  EXPECT_FLOAT_EQ(map.at(0, 5, 5), 1.0f);
  // (cx + w/4, cy) = (26, 22) is cell (5, 6).
  EXPECT_FLOAT_EQ(map.at(0, 5, 6), 0.75f);
  // (cx + w/2, cy) = (30, 22) lies on the ellipse: cell (5, 7).
  EXPECT_FLOAT_EQ(map.at(0, 5, 7), 0.0f);
  // (cx, cy + h/2) = (22, 26) lies on the ellipse: cell (6, 5).
  EXPECT_FLOAT_EQ(map.at(0, 6, 5), 0.0f);
}

TEST(MergeMax, Examples) {
  Heatmap a(1, 1, 2, 4.0f, {0.3f, 0.0f});
  Heatmap b(1, 1, 2, 4.0f, {0.7f, 0.1f});
  const Heatmap m = merge_max(a, b);
  EXPECT_FLOAT_EQ(m.at(0, 0, 0), 0.7f);
  EXPECT_FLOAT_EQ(m.at(0, 0, 1), 0.1f);
  EXPECT_EQ(merge_max(Heatmap(1, 1, 2, 4.0f), b), b);
  EXPECT_EQ(merge_max(a, a), a);
  EXPECT_THROW(merge_max(a, Heatmap(1, 2, 1, 4.0f)), std::invalid_argument);
  EXPECT_THROW(merge_max(a, Heatmap(1, 1, 2, 2.0f)), std::invalid_argument);
}

TEST(MergeMaxProperty, CommutativeAssociativeIdempotent) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  auto random_map = [&] {
    Heatmap m(2, 5, 7, 4.0f);
    for (float& v : m.data()) v = u(rng);
    return m;
  };
  for (int k = 0; k < 200; ++k) {
    const Heatmap a = random_map(), b = random_map(), c = random_map();
    EXPECT_EQ(merge_max(a, b), merge_max(b, a));
    EXPECT_EQ(merge_max(merge_max(a, b), c), merge_max(a, merge_max(b, c)));
    EXPECT_EQ(merge_max(a, a), a);
  }
}
