#include "centerkit/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace centerkit {
namespace {

double axis_factor(double a, double b, double exponent) {
  if (exponent == 0.0) return 1.0;
  const double ratio = std::min(a, b) / std::max(a, b);
  return std::pow(ratio, exponent);
}

// Half-open range [begin, end) of grid indices whose sample coordinate lies
// strictly between lo and hi.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const { return begin >= end; }
};

IndexRange interior_samples(double lo, double hi, double stride, std::size_t count) {
  IndexRange range;
  if (count == 0 || !(hi > lo)) return range;
  double first = std::floor(lo / stride - 0.5);
  std::size_t idx = first > 0.0 ? static_cast<std::size_t>(first) : 0;
  while (idx < count && (static_cast<double>(idx) + 0.5) * stride <= lo) ++idx;
  range.begin = idx;
  while (idx < count && (static_cast<double>(idx) + 0.5) * stride < hi) ++idx;
  range.end = idx;
  return range;
}

std::size_t nearest_index(double coord, double stride, std::size_t count) {
  double cell = std::floor(coord / stride);
  if (cell <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(cell), count - 1);
}

void mark_nearest_cell(Heatmap& map, const BoundingBox& box) {
  if (map.height() == 0 || map.width() == 0) return;
  const Point2 c = box_center(box);
  const std::size_t i = nearest_index(c.y, map.stride(), map.height());
  const std::size_t j = nearest_index(c.x, map.stride(), map.width());
  map.at(0, i, j) = 1.0f;
}

void check_stride(float stride) {
  if (!(stride > 0.0f) || !std::isfinite(stride)) {
    throw std::invalid_argument("stride must be positive and finite");
  }
}

}  // namespace

Heatmap::Heatmap(std::size_t channels, std::size_t height, std::size_t width, float stride)
    : channels_(channels),
      height_(height),
      width_(width),
      stride_(stride),
      data_(channels * height * width, 0.0f) {}

Heatmap::Heatmap(std::size_t channels, std::size_t height, std::size_t width, float stride,
                 std::vector<float> data)
    : channels_(channels), height_(height), width_(width), stride_(stride), data_(std::move(data)) {
  if (data_.size() != channels * height * width) {
    throw std::invalid_argument("heatmap data length does not match its shape");
  }
}

Heatmap Heatmap::for_image(const ImageInfo& image, float stride, std::size_t channels) {
  check_stride(stride);
  const auto rows = static_cast<std::size_t>(std::ceil(image.height / static_cast<double>(stride)));
  const auto cols = static_cast<std::size_t>(std::ceil(image.width / static_cast<double>(stride)));
  return Heatmap(channels, rows, cols, stride);
}

bool Heatmap::same_shape(const Heatmap& other) const {
  return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_ &&
         stride_ == other.stride_;
}

Heatmap Heatmap::extract_channel(std::size_t c) const {
  if (c >= channels_) throw std::out_of_range("channel index out of range");
  auto plane = channel(c);
  return Heatmap(1, height_, width_, stride_, std::vector<float>(plane.begin(), plane.end()));
}

void Heatmap::set_channel(std::size_t c, const Heatmap& src) {
  if (c >= channels_) throw std::out_of_range("channel index out of range");
  if (src.channels() != 1 || src.height() != height_ || src.width() != width_) {
    throw std::invalid_argument("set_channel: source plane has a different shape");
  }
  std::copy(src.data_.begin(), src.data_.end(), channel(c).begin());
}

double gc_value(double l, double r, double t, double b, const GcParams& params) {
  if (l < 0.0 || r < 0.0 || t < 0.0 || b < 0.0) {
    throw std::domain_error("gc_value: edge distances must be non-negative");
  }
  if (!(l + r > 0.0) || !(t + b > 0.0)) {
    throw std::domain_error("gc_value: degenerate box axis");
  }
  return axis_factor(l, r, params.eta) * axis_factor(t, b, params.phi);
}

Heatmap render_gc(std::span<const BoundingBox> boxes, const ImageInfo& image, float stride,
                  const GcParams& params) {
  if (!(params.eta >= 0.0) || !(params.phi >= 0.0) || !std::isfinite(params.eta) ||
      !std::isfinite(params.phi)) {
    throw std::invalid_argument("GC exponents must be finite and non-negative");
  }
  Heatmap map = Heatmap::for_image(image, stride, 1);
  const double s = stride;
  for (const BoundingBox& box : boxes) {
    const double x1 = box.x + box.w;
    const double y1 = box.y + box.h;
    const IndexRange cols = interior_samples(box.x, x1, s, map.width());
    const IndexRange rows = interior_samples(box.y, y1, s, map.height());
    if (cols.empty() || rows.empty()) {
      mark_nearest_cell(map, box);
      continue;
    }
    for (std::size_t i = rows.begin; i < rows.end; ++i) {
      const double sy = map.sample_y(i);
      const double fy = axis_factor(sy - box.y, y1 - sy, params.phi);
      for (std::size_t j = cols.begin; j < cols.end; ++j) {
        const double sx = map.sample_x(j);
        const double v = axis_factor(sx - box.x, x1 - sx, params.eta) * fy;
        float& cell = map.at(0, i, j);
        cell = std::max(cell, static_cast<float>(v));
      }
    }
  }
  return map;
}

Heatmap render_gaussian(std::span<const Point2> centers, const ImageInfo& image, float stride,
                        double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian sigma must be positive");
  }
  Heatmap map = Heatmap::for_image(image, stride, 1);
  const double s = stride;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  for (const Point2& c : centers) {
    const double gx = c.x / s - 0.5;
    const double gy = c.y / s - 0.5;
    for (std::size_t i = 0; i < map.height(); ++i) {
      const double dy = static_cast<double>(i) - gy;
      for (std::size_t j = 0; j < map.width(); ++j) {
        const double dx = static_cast<double>(j) - gx;
        const double v = std::exp(-(dx * dx + dy * dy) * inv_two_var);
        float& cell = map.at(0, i, j);
        cell = std::max(cell, static_cast<float>(v));
      }
    }
  }
  return map;
}

Heatmap render_ellipse(std::span<const BoundingBox> boxes, const ImageInfo& image,
                       float stride) {
  Heatmap map = Heatmap::for_image(image, stride, 1);
  for (const BoundingBox& box : boxes) {
    if (!(box.w > 0.0) || !(box.h > 0.0)) {
      mark_nearest_cell(map, box);
      continue;
    }
    const Point2 c = box_center(box);
    const IndexRange cols = interior_samples(box.x, box.x + box.w, stride, map.width());
    const IndexRange rows = interior_samples(box.y, box.y + box.h, stride, map.height());
    bool touched = false;
    for (std::size_t i = rows.begin; i < rows.end; ++i) {
      const double ny = 2.0 * (map.sample_y(i) - c.y) / box.h;
      for (std::size_t j = cols.begin; j < cols.end; ++j) {
        const double nx = 2.0 * (map.sample_x(j) - c.x) / box.w;
        const double v = 1.0 - (nx * nx + ny * ny);
        if (v <= 0.0) continue;
        touched = true;
        float& cell = map.at(0, i, j);
        cell = std::max(cell, static_cast<float>(v));
      }
    }
    if (!touched) mark_nearest_cell(map, box);
  }
  return map;
}

Heatmap merge_max(const Heatmap& a, const Heatmap& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("merge_max: heatmaps differ in shape or stride");
  }
  Heatmap out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = std::max(dst[k], src[k]);
  return out;
}

}  // namespace centerkit
