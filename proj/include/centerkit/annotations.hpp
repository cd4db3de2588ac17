#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace centerkit {

struct ImageInfo {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;
  std::string file_name;
};

/// Axis-aligned box in image pixels, (x, y) being the top-left corner.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  std::int64_t category_id = 0;
  std::int64_t image_id = 0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class SizeBand { kSmall, kMedium, kLarge };

const char* to_string(SizeBand band);
std::optional<SizeBand> parse_size_band(std::string_view name);

struct Dataset {
  std::vector<ImageInfo> images;
  std::vector<BoundingBox> boxes;
  std::map<std::int64_t, std::string> categories;

  const ImageInfo* find_image(std::int64_t id) const;
  bool has_category(std::int64_t id) const {
    return categories.count(id) != 0;
  }
};

/// Parses the COCO subset {images, annotations, categories}. Boxes are
/// clamped to their image; zero-area boxes are kept. Throws ParseError on
/// malformed JSON or missing fields and ReferenceError on dangling ids.
Dataset parse_coco(std::string_view json);

/// Reads and parses a COCO file. Throws IoError if it cannot be read.
Dataset load_coco(const std::filesystem::path& path);

/// Clamps a box to [0, width] x [0, height].
BoundingBox clamp_to_image(const BoundingBox& box, const ImageInfo& image);

Point2 box_center(const BoundingBox& box);

/// Half the box diagonal: the largest center-to-point distance inside the box.
double box_diagonal_threshold(const BoundingBox& box);

/// COCO area bands: small < 32^2 <= medium < 96^2 <= large.
SizeBand size_band(const BoundingBox& box);

bool box_contains(const BoundingBox& box, double x, double y);

}  // namespace centerkit
