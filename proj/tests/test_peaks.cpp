#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "centerkit/peaks.hpp"

using namespace centerkit;

namespace {

Heatmap random_map(std::mt19937_64& rng, std::size_t h, std::size_t w, int levels) {
  // Few distinct levels so plateaus and ties are common.
  std::uniform_int_distribution<int> u(0, levels);
  Heatmap m(1, h, w, 4.0f);
  for (float& v : m.data()) v = static_cast<float>(u(rng)) / static_cast<float>(levels);
  return m;
}

std::size_t row_of(const Heatmap& m, const CenterPoint& p) {
  return static_cast<std::size_t>(p.y / m.stride());
}
std::size_t col_of(const Heatmap& m, const CenterPoint& p) {
  return static_cast<std::size_t>(p.x / m.stride());
}

}  // namespace

TEST(FindPeaks, SingleSpike) {
  Heatmap m(1, 10, 10, 4.0f);
  m.at(0, 3, 7) = 0.9f;
  const auto peaks = find_peaks(m, 0, {});
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_DOUBLE_EQ(peaks[0].x, 30.0);
  EXPECT_DOUBLE_EQ(peaks[0].y, 14.0);
  EXPECT_FLOAT_EQ(peaks[0].score, 0.9f);
}

TEST(FindPeaks, GreedySuppressionKeepsHigherScore) {
  Heatmap m(1, 10, 10, 4.0f);
  m.at(0, 5, 2) = 0.9f;
  m.at(0, 5, 4) = 0.8f;
  const auto peaks = find_peaks(m, 0, {0.5, 3.0, 1});
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_FLOAT_EQ(peaks[0].score, 0.9f);
  // With a smaller radius both survive, higher first.
  const auto both = find_peaks(m, 0, {0.5, 2.0, 1});
  ASSERT_EQ(both.size(), 2u);
  EXPECT_FLOAT_EQ(both[0].score, 0.9f);
  EXPECT_FLOAT_EQ(both[1].score, 0.8f);
}

TEST(FindPeaks, UniformPlateauYieldsFirstCell) {
  Heatmap m(1, 6, 8, 4.0f);
  for (float& v : m.data()) v = 0.7f;
  const auto peaks = find_peaks(m, 0, {0.5, 3.0, 1});
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_DOUBLE_EQ(peaks[0].x, 2.0);
  EXPECT_DOUBLE_EQ(peaks[0].y, 2.0);
}

TEST(FindPeaks, ThresholdAboveOneRejectsEverything) {
  Heatmap m(1, 3, 3, 4.0f);
  m.at(0, 1, 1) = 1.0f;
  EXPECT_TRUE(find_peaks(m, 0, {1.1, 3.0, 1}).empty());
  EXPECT_EQ(find_peaks(m, 0, {1.0, 3.0, 1}).size(), 1u);
}

TEST(FindPeaks, InvalidParameters) {
  Heatmap m(1, 3, 3, 4.0f);
  EXPECT_THROW(find_peaks(m, 0, {-0.1, 3.0, 1}), std::invalid_argument);
  EXPECT_THROW(find_peaks(m, 0, {0.5, -1.0, 1}), std::invalid_argument);
  EXPECT_THROW(find_peaks(m, 0, {0.5, 3.0, 0}), std::invalid_argument);
  EXPECT_THROW(find_peaks(m, 1, {}), std::out_of_range);
}

TEST(PeaksPerClass, TagsAndKeepsChannelsApart) {
  Heatmap m(2, 8, 8, 4.0f);
  m.at(0, 2, 2) = 0.9f;
  m.at(1, 2, 2) = 0.6f;
  const ChannelLayout layout{5, 32, 32, {11, 17}};
  const auto peaks = peaks_per_class(m, layout, {});
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0].category_id, 11);
  EXPECT_EQ(peaks[1].category_id, 17);
  EXPECT_EQ(peaks[0].image_id, 5);
  EXPECT_DOUBLE_EQ(peaks[0].x, peaks[1].x);

  EXPECT_TRUE(peaks_per_class(Heatmap(2, 8, 8, 4.0f), layout, {}).empty());
  EXPECT_THROW(peaks_per_class(m, ChannelLayout{5, 32, 32, {11}}, {}), std::invalid_argument);
}

TEST(PeaksPerClass, CoordinatesClampedToImage) {
  // 30 px wide image at stride 4: the last cell samples x = 30, y = 30.
  Heatmap m(1, 8, 8, 4.0f);
  m.at(0, 7, 7) = 1.0f;
  const auto peaks = peaks_per_class(m, ChannelLayout{1, 29, 29, {1}}, {});
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_DOUBLE_EQ(peaks[0].x, 29.0);
  EXPECT_DOUBLE_EQ(peaks[0].y, 29.0);
}

TEST(FindPeaksProperty, OrderingThresholdSpacingAndLocalMax) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> radius(1, 3);
  for (int k = 0; k < 500; ++k) {
    const Heatmap m = random_map(rng, 12, 15, k % 2 == 0 ? 4 : 1000);
    const PeakParams params{u(rng), 4.0 * u(rng), radius(rng)};
    const auto peaks = find_peaks(m, 0, params);
    for (std::size_t a = 0; a < peaks.size(); ++a) {
      ASSERT_GE(peaks[a].score, params.prob_threshold);
      if (a > 0) ASSERT_LE(peaks[a].score, peaks[a - 1].score);
      const std::size_t i = row_of(m, peaks[a]);
      const std::size_t j = col_of(m, peaks[a]);
      const int r = params.window_radius;
      for (int di = -r; di <= r; ++di) {
        for (int dj = -r; dj <= r; ++dj) {
          const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= 12 || jj >= 15) continue;
          ASSERT_GE(m.at(0, i, j), m.at(0, ii, jj));
        }
      }
      for (std::size_t b = 0; b < a; ++b) {
        const double dx = (peaks[a].x - peaks[b].x) / m.stride();
        const double dy = (peaks[a].y - peaks[b].y) / m.stride();
        ASSERT_GE(std::sqrt(dx * dx + dy * dy), params.min_distance - 1e-12);
      }
    }
  }
}

TEST(FindPeaksProperty, ScalingPreservesLocalMaxima) {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 300; ++k) {
    const Heatmap m = random_map(rng, 10, 10, k % 2 == 0 ? 3 : 500);
    // Power-of-two factors scale floats exactly, so no ties are created.
    const float c = std::ldexp(1.0f, -(k % 6));
    Heatmap scaled = m;
    for (float& v : scaled.data()) v *= c;
    const PeakParams params{0.0, 0.0, 1};
    const auto a = find_peaks(m, 0, params);
    const auto b = find_peaks(scaled, 0, params);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
      EXPECT_EQ(a[n].x, b[n].x);
      EXPECT_EQ(a[n].y, b[n].y);
    }
  }
}

TEST(FindPeaksProperty, Deterministic) {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 100; ++k) {
    const Heatmap m = random_map(rng, 9, 9, 3);
    const auto a = find_peaks(m, 0, {0.2, 2.0, 1});
    const auto b = find_peaks(m, 0, {0.2, 2.0, 1});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
      EXPECT_EQ(a[n].x, b[n].x);
      EXPECT_EQ(a[n].y, b[n].y);
      EXPECT_EQ(a[n].score, b[n].score);
    }
  }
}
