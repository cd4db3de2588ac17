#pragma once

// Implementations behind the `centerkit` subcommands. Each writes its
// result to a stream (or directory) and reports failures through the
// exception types in errors.hpp so the tool can map them to exit codes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "centerkit/config.hpp"
#include "centerkit/heatmap.hpp"
#include "centerkit/ochm.hpp"
#include "centerkit/peaks.hpp"

namespace centerkit {

/// One JSONL line: {"image_id":..,"category_id":..,"x":..,"y":..,"score":..}
std::string point_to_jsonl(const CenterPoint& point);
/// Parses JSONL point records; blank lines are skipped. Throws ParseError
/// naming the offending line.
std::vector<CenterPoint> parse_points_jsonl(std::string_view text);

/// Target heatmap for one image: one channel per category id in `categories`.
Heatmap render_targets(const Dataset& dataset, const ImageInfo& image,
                       std::span<const std::int64_t> categories, const RunConfig& config);

/// Categories in scope: config.categories, or every dataset category.
/// Throws ReferenceError when a requested category is not in the dataset.
std::vector<std::int64_t> categories_in_scope(const Dataset& dataset, const RunConfig& config);

struct HeatmapFile {
  std::filesystem::path path;
  Heatmap map;
  ChannelLayout layout;
};

/// Every *.ochm in `dir` with its sidecar, sorted by image id then filename.
std::vector<HeatmapFile> load_heatmap_dir(const std::filesystem::path& dir, unsigned threads);

/// Writes <image_id>.ochm and <image_id>.json for every image. Returns the
/// number of images written.
std::size_t cmd_gen(const std::filesystem::path& coco, const std::filesystem::path& out_dir,
                    const RunConfig& config);

void cmd_peaks(const std::filesystem::path& heatmap_dir, const RunConfig& config,
               std::ostream& out);

void cmd_eval(const std::filesystem::path& coco, const std::filesystem::path& preds,
              const RunConfig& config, std::ostream& out);

/// `input` is a COCO file (targets are rendered per config) or a heatmap
/// directory. `category` restricts counting to one category's channel.
void cmd_alpha(const std::filesystem::path& input, const RunConfig& config,
               std::optional<std::int64_t> category, std::ostream& out);

void cmd_loss(const std::filesystem::path& pred_dir, const std::filesystem::path& target_dir,
              LossKernel kernel, const RunConfig& config, bool gradcheck, std::ostream& out);

void cmd_viz(const std::filesystem::path& heatmap, std::size_t channel, std::ostream& out);

/// Runs the oracle equivalence suites; prints one line per check.
/// Returns true when every check passes.
bool cmd_selftest(std::ostream& out, std::uint64_t seed = 20240101);

}  // namespace centerkit
