#pragma once

// OCHM raster container. Layout, all little-endian:
//
//   char[4] magic "OCHM"
//   u16     version (1)
//   u16     reserved (0)
//   u32     channels
//   u32     height
//   u32     width
//   f32     stride
//   f32     data[channels * height * width]   channel-major, row-major
//
// A JSON sidecar (<stem>.json) records which image and categories the
// channels belong to.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "centerkit/heatmap.hpp"

namespace centerkit {

inline constexpr std::uint16_t kOchmVersion = 1;
inline constexpr std::size_t kOchmHeaderSize = 24;

std::vector<std::uint8_t> encode_ochm(const Heatmap& map);
/// Throws FormatError on bad magic, version, or a size mismatch.
Heatmap decode_ochm(const std::uint8_t* bytes, std::size_t size);
inline Heatmap decode_ochm(const std::vector<std::uint8_t>& bytes) {
  return decode_ochm(bytes.data(), bytes.size());
}

void write_ochm(const std::filesystem::path& path, const Heatmap& map);
Heatmap read_ochm(const std::filesystem::path& path);

/// Channel -> category association stored next to each raster.
struct ChannelLayout {
  std::int64_t image_id = 0;
  int image_width = 0;
  int image_height = 0;
  std::vector<std::int64_t> category_ids;
};

std::string layout_to_json(const ChannelLayout& layout);
ChannelLayout layout_from_json(const std::string& text);

void write_sidecar(const std::filesystem::path& path, const ChannelLayout& layout);
ChannelLayout read_sidecar(const std::filesystem::path& path);

inline std::filesystem::path sidecar_path(const std::filesystem::path& ochm_path) {
  auto p = ochm_path;
  p.replace_extension(".json");
  return p;
}

/// Writes a single channel as a binary 8-bit PGM (P5); each value maps to
/// floor(v * 255 + 0.5) after clamping to [0, 1].
std::string encode_pgm(const Heatmap& map, std::size_t channel);

}  // namespace centerkit
