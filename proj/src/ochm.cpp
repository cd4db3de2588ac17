#include "centerkit/ochm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "centerkit/errors.hpp"
#include "json.hpp"

namespace centerkit {
namespace {

constexpr char kMagic[4] = {'O', 'C', 'H', 'M'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError(std::string("OCHM ") + what + " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<std::uint8_t> encode_ochm(const Heatmap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kOchmHeaderSize + 4 * map.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u16(out, kOchmVersion);
  put_u16(out, 0);
  put_u32(out, checked_u32(map.channels(), "channel count"));
  put_u32(out, checked_u32(map.height(), "height"));
  put_u32(out, checked_u32(map.width(), "width"));
  put_u32(out, std::bit_cast<std::uint32_t>(map.stride()));
  for (float v : map.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Heatmap decode_ochm(const std::uint8_t* bytes, std::size_t size) {
  if (size < kOchmHeaderSize) throw FormatError("OCHM: truncated header");
  if (std::memcmp(bytes, kMagic, 4) != 0) throw FormatError("OCHM: bad magic");
  const std::uint16_t version = get_u16(bytes + 4);
  if (version != kOchmVersion) {
    throw FormatError("OCHM: unsupported version " + std::to_string(version));
  }
  const std::size_t channels = get_u32(bytes + 8);
  const std::size_t height = get_u32(bytes + 12);
  const std::size_t width = get_u32(bytes + 16);
  const float stride = std::bit_cast<float>(get_u32(bytes + 20));
  if (!(stride > 0.0f) || !std::isfinite(stride)) throw FormatError("OCHM: invalid stride");

  const std::size_t payload = size - kOchmHeaderSize;
  if (payload % 4 != 0) throw FormatError("OCHM: payload is not a whole number of floats");
  const std::size_t count = payload / 4;
  // Divide instead of multiplying so a hostile header cannot overflow.
  bool consistent = false;
  if (channels == 0 || height == 0 || width == 0) {
    consistent = count == 0;
  } else if (count % width == 0 && (count / width) % height == 0) {
    consistent = count / width / height == channels;
  }
  if (!consistent) throw FormatError("OCHM: payload size does not match header");

  std::vector<float> data(count);
  const std::uint8_t* p = bytes + kOchmHeaderSize;
  for (std::size_t k = 0; k < count; ++k, p += 4) data[k] = std::bit_cast<float>(get_u32(p));
  return Heatmap(channels, height, width, stride, std::move(data));
}

void write_ochm(const std::filesystem::path& path, const Heatmap& map) {
  const auto bytes = encode_ochm(map);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Heatmap read_ochm(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  return decode_ochm(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
}

std::string layout_to_json(const ChannelLayout& layout) {
  nlohmann::ordered_json j;
  j["image_id"] = layout.image_id;
  j["width"] = layout.image_width;
  j["height"] = layout.image_height;
  j["categories"] = layout.category_ids;
  return j.dump() + "\n";
}

ChannelLayout layout_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("sidecar: ") + e.what(), e.byte);
  }
  ChannelLayout layout;
  try {
    layout.image_id = j.at("image_id").get<std::int64_t>();
    layout.image_width = j.at("width").get<int>();
    layout.image_height = j.at("height").get<int>();
    layout.category_ids = j.at("categories").get<std::vector<std::int64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sidecar: ") + e.what());
  }
  return layout;
}

void write_sidecar(const std::filesystem::path& path, const ChannelLayout& layout) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out << layout_to_json(layout);
  if (!out) throw IoError("failed writing " + path.string());
}

ChannelLayout read_sidecar(const std::filesystem::path& path) {
  return layout_from_json(read_text(path));
}

std::string encode_pgm(const Heatmap& map, std::size_t channel) {
  if (channel >= map.channels()) throw std::out_of_range("channel index out of range");
  std::string out = "P5\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) +
                    "\n255\n";
  out.reserve(out.size() + map.plane_size());
  for (float v : map.channel(channel)) {
    // NaN renders black.
    const double clamped = std::isnan(v) ? 0.0 : std::clamp(static_cast<double>(v), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5))));
  }
  return out;
}

}  // namespace centerkit
