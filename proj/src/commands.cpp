#include "centerkit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "centerkit/errors.hpp"
#include "centerkit/evaluate.hpp"
#include "centerkit/oracle.hpp"
#include "centerkit/parallel.hpp"
#include "json.hpp"

namespace centerkit {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<fs::path> list_ochm(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ochm") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::string point_to_jsonl(const CenterPoint& p) {
  nlohmann::ordered_json j;
  j["image_id"] = p.image_id;
  j["category_id"] = p.category_id;
  j["x"] = p.x;
  j["y"] = p.y;
  j["score"] = p.score;
  return j.dump();
}

std::vector<CenterPoint> parse_points_jsonl(std::string_view text) {
  std::vector<CenterPoint> points;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    const std::size_t line_start = pos;
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line.begin(), line.end());
      CenterPoint p;
      p.image_id = j.at("image_id").get<std::int64_t>();
      p.category_id = j.at("category_id").get<std::int64_t>();
      p.x = j.at("x").get<double>();
      p.y = j.at("y").get<double>();
      p.score = j.at("score").get<double>();
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !(p.score >= 0.0 && p.score <= 1.0)) {
        throw ParseError("predictions line " + std::to_string(line_no) +
                         ": coordinates must be finite and score in [0, 1]");
      }
      points.push_back(p);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("predictions line " + std::to_string(line_no) + ": " + e.what(),
                       line_start + e.byte);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return points;
}

std::vector<std::int64_t> categories_in_scope(const Dataset& dataset, const RunConfig& config) {
  std::vector<std::int64_t> out;
  if (config.categories.empty()) {
    for (const auto& [id, name] : dataset.categories) out.push_back(id);
    return out;
  }
  std::vector<std::int64_t> missing;
  for (std::int64_t id : config.categories) {
    if (!dataset.has_category(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = "unknown category ids:";
    for (auto id : missing) msg += " " + std::to_string(id);
    throw ReferenceError(msg, missing);
  }
  out = config.categories;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Heatmap render_targets(const Dataset& dataset, const ImageInfo& image,
                       std::span<const std::int64_t> categories, const RunConfig& config) {
  Heatmap target = Heatmap::for_image(image, config.stride, categories.size());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    std::vector<BoundingBox> boxes;
    for (const BoundingBox& b : dataset.boxes) {
      if (b.image_id == image.id && b.category_id == categories[c]) boxes.push_back(b);
    }
    Heatmap plane;
    switch (config.gt) {
      case GtKind::kGc:
        plane = render_gc(boxes, image, config.stride, config.gc);
        break;
      case GtKind::kGaussian: {
        std::vector<Point2> centers;
        for (const BoundingBox& b : boxes) centers.push_back(box_center(b));
        plane = render_gaussian(centers, image, config.stride, config.sigma);
        break;
      }
      case GtKind::kEllipse:
        plane = render_ellipse(boxes, image, config.stride);
        break;
    }
    target.set_channel(c, plane);
  }
  return target;
}

std::vector<HeatmapFile> load_heatmap_dir(const fs::path& dir, unsigned threads) {
  const auto paths = list_ochm(dir);
  std::vector<HeatmapFile> files(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i) {
    files[i].path = paths[i];
    files[i].map = read_ochm(paths[i]);
    const fs::path side = sidecar_path(paths[i]);
    if (!fs::exists(side)) throw IoError("missing sidecar " + side.string());
    files[i].layout = read_sidecar(side);
    if (files[i].layout.category_ids.size() != files[i].map.channels()) {
      throw FormatError("sidecar " + side.string() + " does not list one category per channel");
    }
  });
  std::stable_sort(files.begin(), files.end(), [](const HeatmapFile& a, const HeatmapFile& b) {
    return a.layout.image_id < b.layout.image_id;
  });
  return files;
}

std::size_t cmd_gen(const fs::path& coco, const fs::path& out_dir, const RunConfig& config) {
  validate(config);
  const Dataset dataset = load_coco(coco);
  const std::vector<std::int64_t> categories = categories_in_scope(dataset, config);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create " + out_dir.string());

  parallel_for(dataset.images.size(), config.threads, [&](std::size_t i) {
    const ImageInfo& image = dataset.images[i];
    const Heatmap target = render_targets(dataset, image, categories, config);
    const fs::path stem = out_dir / std::to_string(image.id);
    write_ochm(fs::path(stem).replace_extension(".ochm"), target);
    write_sidecar(fs::path(stem).replace_extension(".json"),
                  {image.id, image.width, image.height, categories});
  });
  return dataset.images.size();
}

void cmd_peaks(const fs::path& heatmap_dir, const RunConfig& config, std::ostream& out) {
  validate(config);
  const auto files = load_heatmap_dir(heatmap_dir, config.threads);
  std::vector<std::vector<CenterPoint>> per_file(files.size());
  parallel_for(files.size(), config.threads, [&](std::size_t i) {
    per_file[i] = peaks_per_class(files[i].map, files[i].layout, config.peaks);
  });
  std::vector<CenterPoint> all;
  for (auto& pts : per_file) all.insert(all.end(), pts.begin(), pts.end());
  // Within one (image, category) the peaks are already in descending score order.
  std::stable_sort(all.begin(), all.end(), [](const CenterPoint& a, const CenterPoint& b) {
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    return a.category_id < b.category_id;
  });
  for (const CenterPoint& p : all) out << point_to_jsonl(p) << '\n';
}

void cmd_eval(const fs::path& coco, const fs::path& preds, const RunConfig& config,
              std::ostream& out) {
  validate(config);
  const Dataset dataset = load_coco(coco);
  const std::vector<CenterPoint> points = parse_points_jsonl(read_file(preds));
  const CasReport report = evaluate(dataset, points, config.eval_options());
  out << report_to_json(report);
}

void cmd_alpha(const fs::path& input, const RunConfig& config,
               std::optional<std::int64_t> category, std::ostream& out) {
  validate(config);
  AlphaCount acc;
  std::error_code ec;
  if (fs::is_directory(input, ec)) {
    for (const HeatmapFile& f : load_heatmap_dir(input, config.threads)) {
      if (!category) {
        count_alpha(f.map, config.alpha_threshold, std::nullopt, acc);
        continue;
      }
      const auto& ids = f.layout.category_ids;
      auto it = std::find(ids.begin(), ids.end(), *category);
      if (it == ids.end()) continue;
      count_alpha(f.map, config.alpha_threshold, static_cast<std::size_t>(it - ids.begin()), acc);
    }
  } else {
    const Dataset dataset = load_coco(input);
    RunConfig scoped = config;
    if (category) scoped.categories = {*category};
    const auto categories = categories_in_scope(dataset, scoped);
    std::vector<AlphaCount> counts(dataset.images.size());
    parallel_for(dataset.images.size(), config.threads, [&](std::size_t i) {
      const Heatmap target = render_targets(dataset, dataset.images[i], categories, scoped);
      count_alpha(target, config.alpha_threshold, std::nullopt, counts[i]);
    });
    for (const AlphaCount& c : counts) {
      acc.negatives += c.negatives;
      acc.cells += c.cells;
    }
  }
  nlohmann::ordered_json j;
  j["alpha"] = acc.alpha();
  j["threshold"] = config.alpha_threshold;
  j["negatives"] = acc.negatives;
  j["cells"] = acc.cells;
  out << j.dump(2) << '\n';
}

void cmd_loss(const fs::path& pred_dir, const fs::path& target_dir, LossKernel kernel,
              const RunConfig& config, bool gradcheck, std::ostream& out) {
  validate(config);
  const auto pred_files = list_ochm(pred_dir);
  const LossParams params = config.loss_params();

  struct FileLoss {
    LossReport report;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
  };
  std::vector<FileLoss> results(pred_files.size());
  parallel_for(pred_files.size(), config.threads, [&](std::size_t i) {
    const fs::path target_path = target_dir / pred_files[i].filename();
    if (!fs::exists(target_path)) throw IoError("no target for " + pred_files[i].string());
    const Heatmap pred = read_ochm(pred_files[i]);
    const Heatmap target = read_ochm(target_path);
    results[i].report = reduce_loss(pred, target, kernel, params);
    if (!gradcheck) return;
    // Central differences lose accuracy when p +- h nears the clamp or the
    // cusp at p = y; those cells are skipped.
    constexpr double kStep = 1e-5;
    constexpr double kMinGap = 1e-2;
    const BcflParams bp{config.alpha, config.gamma};
    auto p = pred.data();
    auto y = target.data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double pk = p[k];
      const double yk = y[k];
      if (pk < 0.01 || pk > 0.99 || std::abs(pk - yk) < kMinGap) continue;
      const double analytic = bcfl_grad_p(pk, yk, bp);
      const double numeric =
          oracle::finite_diff([&](double q) { return bcfl(q, yk, bp); }, pk, kStep);
      results[i].max_rel_error =
          std::max(results[i].max_rel_error, oracle::relative_error(analytic, numeric));
      ++results[i].checked;
    }
  });

  std::size_t cells = 0;
  std::size_t channels = 0;
  double weighted_total = 0.0;
  std::vector<double> channel_sum;
  std::vector<std::size_t> channel_cells;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const LossReport& r = results[i].report;
    if (i == 0) {
      channels = r.per_channel.size();
      channel_sum.assign(channels, 0.0);
      channel_cells.assign(channels, 0);
    } else if (r.per_channel.size() != channels) {
      throw FormatError("heatmaps in " + pred_dir.string() + " differ in channel count");
    }
    const std::size_t plane = channels == 0 ? 0 : r.cell_count / channels;
    for (std::size_t c = 0; c < channels; ++c) {
      channel_sum[c] += r.per_channel[c] * static_cast<double>(plane);
      channel_cells[c] += plane;
    }
    weighted_total += r.total * static_cast<double>(r.cell_count);
    cells += r.cell_count;
    max_rel_error = std::max(max_rel_error, results[i].max_rel_error);
    checked += results[i].checked;
  }

  nlohmann::ordered_json j;
  j["kernel"] = to_string(kernel);
  j["total"] = cells == 0 ? 0.0 : weighted_total / static_cast<double>(cells);
  auto& per_channel = j["per_channel"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < channels; ++c) {
    per_channel.push_back(channel_cells[c] == 0 ? 0.0 : channel_sum[c] / channel_cells[c]);
  }
  j["cell_count"] = cells;
  j["files"] = results.size();
  if (gradcheck) {
    j["gradcheck"] = {{"max_rel_error", max_rel_error}, {"checked", checked}};
  }
  out << j.dump(2) << '\n';
}

void cmd_viz(const fs::path& heatmap, std::size_t channel, std::ostream& out) {
  const Heatmap map = read_ochm(heatmap);
  if (channel >= map.channels()) {
    throw std::invalid_argument("channel " + std::to_string(channel) + " out of range (" +
                                std::to_string(map.channels()) + " channels)");
  }
  out << encode_pgm(map, channel);
}

}  // namespace centerkit
