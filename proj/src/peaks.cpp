#include "centerkit/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace centerkit {
namespace {

struct Candidate {
  std::size_t row;
  std::size_t col;
  float score;
};

void validate(const PeakParams& params) {
  // Thresholds above 1 are accepted and reject every cell.
  if (!(params.prob_threshold >= 0.0)) throw std::invalid_argument("prob_threshold must be >= 0");
  if (!(params.min_distance >= 0.0)) throw std::invalid_argument("min_distance must be >= 0");
  if (params.window_radius < 1) throw std::invalid_argument("window_radius must be >= 1");
}

// A cell is a local maximum if it is strictly greater than every window
// neighbour that precedes it in row-major order and no smaller than every
// neighbour that follows it.
bool is_local_max(std::span<const float> plane, std::size_t height, std::size_t width,
                  std::size_t i, std::size_t j, std::size_t r) {
  const float v = plane[i * width + j];
  const std::size_t i0 = i >= r ? i - r : 0;
  const std::size_t j0 = j >= r ? j - r : 0;
  const std::size_t i1 = std::min(height - 1, i + r);
  const std::size_t j1 = std::min(width - 1, j + r);
  for (std::size_t a = i0; a <= i1; ++a) {
    for (std::size_t b = j0; b <= j1; ++b) {
      if (a == i && b == j) continue;
      const float n = plane[a * width + b];
      const bool before = a < i || (a == i && b < j);
      if (before ? !(v > n) : !(v >= n)) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<CenterPoint> find_peaks(const Heatmap& map, std::size_t channel,
                                    const PeakParams& params) {
  validate(params);
  if (channel >= map.channels()) throw std::out_of_range("channel index out of range");
  const std::size_t height = map.height();
  const std::size_t width = map.width();
  const auto plane = map.channel(channel);
  const auto r = static_cast<std::size_t>(params.window_radius);

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const float v = plane[i * width + j];
      if (static_cast<double>(v) < params.prob_threshold) continue;
      if (is_local_max(plane, height, width, i, j, r)) candidates.push_back({i, j, v});
    }
  }
  // Candidates are already in row-major order; a stable sort keeps it for ties.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  const double min_d2 = params.min_distance * params.min_distance;
  std::vector<Candidate> kept;
  for (const Candidate& c : candidates) {
    bool suppressed = false;
    for (const Candidate& k : kept) {
      const double di = static_cast<double>(c.row) - static_cast<double>(k.row);
      const double dj = static_cast<double>(c.col) - static_cast<double>(k.col);
      if (di * di + dj * dj < min_d2) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(c);
  }

  std::vector<CenterPoint> out;
  out.reserve(kept.size());
  for (const Candidate& k : kept) {
    out.push_back({map.sample_x(k.col), map.sample_y(k.row), static_cast<double>(k.score), 0, 0});
  }
  return out;
}

std::vector<CenterPoint> peaks_per_class(const Heatmap& map, const ChannelLayout& layout,
                                         const PeakParams& params) {
  if (layout.category_ids.size() != map.channels()) {
    throw std::invalid_argument("channel layout does not cover every heatmap channel");
  }
  std::vector<CenterPoint> out;
  for (std::size_t c = 0; c < map.channels(); ++c) {
    for (CenterPoint p : find_peaks(map, c, params)) {
      p.category_id = layout.category_ids[c];
      p.image_id = layout.image_id;
      if (layout.image_width > 0) p.x = std::min(p.x, static_cast<double>(layout.image_width));
      if (layout.image_height > 0) p.y = std::min(p.y, static_cast<double>(layout.image_height));
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace centerkit
