#include "centerkit/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "centerkit/errors.hpp"
#include "json.hpp"

namespace centerkit {
namespace {

using nlohmann::json;

const json& require_field(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string(where) + ": missing field '" + key + "'");
  }
  return *it;
}

const json& require_array(const json& root, const char* key) {
  const json& arr = require_field(root, key, "COCO root");
  if (!arr.is_array()) {
    throw ParseError(std::string("COCO root: '") + key + "' is not an array");
  }
  return arr;
}

std::int64_t as_id(const json& value, const char* what) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) {
    double v = value.get<double>();
    if (std::isfinite(v) && v == std::floor(v)) return static_cast<std::int64_t>(v);
  }
  throw ParseError(std::string(what) + " must be an integer");
}

double as_number(const json& value, const char* what) {
  if (!value.is_number()) throw ParseError(std::string(what) + " must be a number");
  double v = value.get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string(what) + " must be finite");
  return v;
}

}  // namespace

const char* to_string(SizeBand band) {
  switch (band) {
    case SizeBand::kSmall: return "small";
    case SizeBand::kMedium: return "medium";
    case SizeBand::kLarge: return "large";
  }
  return "?";
}

std::optional<SizeBand> parse_size_band(std::string_view name) {
  if (name == "small") return SizeBand::kSmall;
  if (name == "medium") return SizeBand::kMedium;
  if (name == "large") return SizeBand::kLarge;
  return std::nullopt;
}

const ImageInfo* Dataset::find_image(std::int64_t id) const {
  auto it = std::lower_bound(images.begin(), images.end(), id,
                             [](const ImageInfo& im, std::int64_t v) { return im.id < v; });
  if (it != images.end() && it->id == id) return &*it;
  return nullptr;
}

Dataset parse_coco(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) +
                         ": " + e.what(),
                     e.byte);
  }
  if (!root.is_object()) throw ParseError("COCO root must be a JSON object");

  Dataset ds;
  for (const json& im : require_array(root, "images")) {
    ImageInfo info;
    info.id = as_id(require_field(im, "id", "image"), "image.id");
    double w = as_number(require_field(im, "width", "image"), "image.width");
    double h = as_number(require_field(im, "height", "image"), "image.height");
    if (w <= 0.0 || h <= 0.0) {
      throw ParseError("image " + std::to_string(info.id) + " has non-positive size");
    }
    info.width = static_cast<int>(std::lround(w));
    info.height = static_cast<int>(std::lround(h));
    if (auto it = im.find("file_name"); it != im.end() && it->is_string()) {
      info.file_name = it->get<std::string>();
    }
    ds.images.push_back(std::move(info));
  }
  std::sort(ds.images.begin(), ds.images.end(),
            [](const ImageInfo& a, const ImageInfo& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < ds.images.size(); ++i) {
    if (ds.images[i].id == ds.images[i - 1].id) {
      throw ParseError("duplicate image id " + std::to_string(ds.images[i].id));
    }
  }

  for (const json& cat : require_array(root, "categories")) {
    std::int64_t id = as_id(require_field(cat, "id", "category"), "category.id");
    std::string name;
    if (auto it = cat.find("name"); it != cat.end() && it->is_string()) {
      name = it->get<std::string>();
    }
    if (!ds.categories.emplace(id, std::move(name)).second) {
      throw ParseError("duplicate category id " + std::to_string(id));
    }
  }

  std::set<std::int64_t> missing_images;
  std::set<std::int64_t> missing_categories;
  for (const json& ann : require_array(root, "annotations")) {
    BoundingBox box;
    box.image_id = as_id(require_field(ann, "image_id", "annotation"), "annotation.image_id");
    box.category_id =
        as_id(require_field(ann, "category_id", "annotation"), "annotation.category_id");
    const json& bbox = require_field(ann, "bbox", "annotation");
    if (!bbox.is_array() || bbox.size() != 4) {
      throw ParseError("annotation.bbox must be [x, y, w, h]");
    }
    box.x = as_number(bbox[0], "bbox.x");
    box.y = as_number(bbox[1], "bbox.y");
    box.w = as_number(bbox[2], "bbox.w");
    box.h = as_number(bbox[3], "bbox.h");
    if (box.w < 0.0 || box.h < 0.0) throw ParseError("annotation.bbox has negative size");

    const ImageInfo* image = ds.find_image(box.image_id);
    bool ok = true;
    if (image == nullptr) {
      missing_images.insert(box.image_id);
      ok = false;
    }
    if (!ds.has_category(box.category_id)) {
      missing_categories.insert(box.category_id);
      ok = false;
    }
    if (ok) ds.boxes.push_back(clamp_to_image(box, *image));
  }

  if (!missing_images.empty() || !missing_categories.empty()) {
    std::ostringstream msg;
    std::vector<std::int64_t> ids;
    msg << "annotations reference unknown ids:";
    if (!missing_images.empty()) {
      msg << " image_id";
      for (auto id : missing_images) {
        msg << ' ' << id;
        ids.push_back(id);
      }
    }
    if (!missing_categories.empty()) {
      msg << (missing_images.empty() ? "" : ";") << " category_id";
      for (auto id : missing_categories) {
        msg << ' ' << id;
        ids.push_back(id);
      }
    }
    throw ReferenceError(msg.str(), std::move(ids));
  }
  return ds;
}

Dataset load_coco(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return parse_coco(buf.str());
}

BoundingBox clamp_to_image(const BoundingBox& box, const ImageInfo& image) {
  const double width = image.width;
  const double height = image.height;
  double x0 = std::clamp(box.x, 0.0, width);
  double y0 = std::clamp(box.y, 0.0, height);
  double x1 = std::clamp(box.x + box.w, 0.0, width);
  double y1 = std::clamp(box.y + box.h, 0.0, height);
  BoundingBox out = box;
  out.x = x0;
  out.y = y0;
  out.w = x1 - x0;
  out.h = y1 - y0;
  return out;
}

Point2 box_center(const BoundingBox& box) {
  return {box.x + box.w / 2.0, box.y + box.h / 2.0};
}

double box_diagonal_threshold(const BoundingBox& box) {
  return 0.5 * std::sqrt(box.w * box.w + box.h * box.h);
}

SizeBand size_band(const BoundingBox& box) {
  constexpr double kSmallMax = 32.0 * 32.0;
  constexpr double kMediumMax = 96.0 * 96.0;
  const double area = box.w * box.h;
  if (area < kSmallMax) return SizeBand::kSmall;
  if (area < kMediumMax) return SizeBand::kMedium;
  return SizeBand::kLarge;
}

bool box_contains(const BoundingBox& box, double x, double y) {
  return x >= box.x && x <= box.x + box.w && y >= box.y && y <= box.y + box.h;
}

}  // namespace centerkit
