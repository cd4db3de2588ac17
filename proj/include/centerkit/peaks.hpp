#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "centerkit/heatmap.hpp"
#include "centerkit/ochm.hpp"

namespace centerkit {

struct PeakParams {
  double prob_threshold = 0.5;
  // Greedy suppression radius, in grid cells.
  double min_distance = 3.0;
  // Local-max window is (2r+1) x (2r+1).
  int window_radius = 1;
};

struct CenterPoint {
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;
  std::int64_t category_id = 0;
  std::int64_t image_id = 0;
};

/// Local-max NMS on one channel, then probability threshold, then greedy
/// minimum-distance suppression in descending score order. Plateau ties
/// keep the row-major first cell. Output is sorted by descending score,
/// ties in row-major order; ids are left zero.
std::vector<CenterPoint> find_peaks(const Heatmap& map, std::size_t channel,
                                    const PeakParams& params);

/// find_peaks on every channel, tagging points with the layout's ids and
/// clamping coordinates to the image. Throws std::invalid_argument when the
/// layout does not name one category per channel.
std::vector<CenterPoint> peaks_per_class(const Heatmap& map, const ChannelLayout& layout,
                                         const PeakParams& params);

}  // namespace centerkit
