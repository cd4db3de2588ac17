#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "centerkit/annotations.hpp"

namespace centerkit {

/// Multi-channel float raster, channel-major and row-major within a channel.
/// Cell (i, j) samples the image at ((j + 0.5) * stride, (i + 0.5) * stride).
class Heatmap {
 public:
  Heatmap() = default;
  Heatmap(std::size_t channels, std::size_t height, std::size_t width, float stride);
  Heatmap(std::size_t channels, std::size_t height, std::size_t width, float stride,
          std::vector<float> data);

  /// Grid sized to cover `image` at `stride`: ceil(H / stride) x ceil(W / stride).
  static Heatmap for_image(const ImageInfo& image, float stride, std::size_t channels);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  float stride() const { return stride_; }
  std::size_t plane_size() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }

  float& at(std::size_t c, std::size_t i, std::size_t j) {
    return data_[(c * height_ + i) * width_ + j];
  }
  float at(std::size_t c, std::size_t i, std::size_t j) const {
    return data_[(c * height_ + i) * width_ + j];
  }

  std::span<float> channel(std::size_t c) {
    return {data_.data() + c * plane_size(), plane_size()};
  }
  std::span<const float> channel(std::size_t c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  /// Image-space coordinate of the sample point for a column / row index.
  double sample_x(std::size_t j) const { return (static_cast<double>(j) + 0.5) * stride_; }
  double sample_y(std::size_t i) const { return (static_cast<double>(i) + 0.5) * stride_; }

  bool same_shape(const Heatmap& other) const;

  /// Copies one channel into a new single-channel map.
  Heatmap extract_channel(std::size_t c) const;
  /// Overwrites channel `c` with the single channel of `src`.
  void set_channel(std::size_t c, const Heatmap& src);

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  float stride_ = 1.0f;
  std::vector<float> data_;
};

/// Shape exponents of Generalized Centerness along x (eta) and y (phi).
struct GcParams {
  double eta = 0.5;
  double phi = 0.5;
};

/// (min(l,r)/max(l,r))^eta * (min(t,b)/max(t,b))^phi for a point with the
/// given distances to the left/right/top/bottom box edges. A zero exponent
/// makes its factor 1. Throws std::domain_error when l+r or t+b is zero or
/// any distance is negative.
double gc_value(double l, double r, double t, double b, const GcParams& params);

/// Renders one category of boxes as a Generalized Centerness map. Cells
/// covered by several boxes keep the largest value; a box whose interior
/// holds no sample point marks the cell nearest its center with 1.
Heatmap render_gc(std::span<const BoundingBox> boxes, const ImageInfo& image, float stride,
                  const GcParams& params);

/// Fixed-sigma Gaussian at each center, sigma in grid cells.
Heatmap render_gaussian(std::span<const Point2> centers, const ImageInfo& image, float stride,
                        double sigma);

/// Quadratic falloff inside each box's inscribed ellipse:
/// max(0, 1 - (2(x-cx)/w)^2 - (2(y-cy)/h)^2).
Heatmap render_ellipse(std::span<const BoundingBox> boxes, const ImageInfo& image,
                       float stride);

/// Cellwise maximum. Throws std::invalid_argument on shape or stride mismatch.
Heatmap merge_max(const Heatmap& a, const Heatmap& b);

}  // namespace centerkit
