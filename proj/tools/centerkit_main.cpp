// centerkit: heatmap targets, peak extraction and center-point evaluation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "centerkit/commands.hpp"
#include "centerkit/errors.hpp"

using namespace centerkit;

namespace {

// Flag values as parsed; only the ones the user actually passed are applied
// on top of the defaults and the --config file.
struct Flags {
  std::string config;
  float stride = 0;
  double eta = 0, phi = 0, sigma = 0;
  std::string gt;
  double threshold = 0, min_distance = 0;
  int window_radius = 0;
  double lambda = 0, mu = 0, alpha = 0, gamma = 0;
  double pos_weight = 0, fl_positive = 0, alpha_threshold = 0;
  std::string aggregation, band;
  unsigned threads = 0;
  std::vector<std::int64_t> categories;
};

struct FlagOptions {
  std::map<std::string, CLI::Option*> by_name;
  bool given(const std::string& name) const {
    auto it = by_name.find(name);
    return it != by_name.end() && it->second->count() > 0;
  }
};

FlagOptions add_run_flags(CLI::App& cmd, Flags& f) {
  FlagOptions o;
  auto add = [&](const std::string& name, auto& target, const std::string& help) {
    o.by_name[name] = cmd.add_option("--" + name, target, help);
    return o.by_name[name];
  };
  add("config", f.config, "JSON file with default settings (flags override it)");
  add("stride", f.stride, "Output stride in pixels (default 4)");
  add("eta", f.eta, "Horizontal centerness exponent (default 0.5)");
  add("phi", f.phi, "Vertical centerness exponent (default 0.5)");
  add("gt", f.gt, "Target kind: gc, gaussian or ellipse")
      ->check(CLI::IsMember({"gc", "gaussian", "ellipse"}));
  add("sigma", f.sigma, "Gaussian sigma in grid cells (default 2)");
  add("threshold", f.threshold, "Peak probability threshold (default 0.5)");
  add("min-distance", f.min_distance, "Peak suppression radius in cells (default 3)");
  add("window-radius", f.window_radius, "Local maximum window radius (default 1)");
  add("lambda", f.lambda, "Distance weight of the matching cost (default 1)");
  add("mu", f.mu, "Score weight of the matching cost (default 1)");
  add("alpha", f.alpha, "Loss balance factor (default 0.984)");
  add("gamma", f.gamma, "Loss focusing exponent (default 2)");
  add("pos-weight", f.pos_weight, "Positive weight of wbce/wmse (default 1)");
  add("fl-positive", f.fl_positive, "Target value treated as positive by fl (default 0.5)");
  add("alpha-threshold", f.alpha_threshold,
      "Target value separating positives when estimating alpha (default 0.6)");
  add("aggregation", f.aggregation, "pooled or macro")
      ->check(CLI::IsMember({"pooled", "macro"}));
  add("band", f.band, "Report CAS of small, medium, large or all objects")
      ->check(CLI::IsMember({"small", "medium", "large", "all"}));
  add("threads", f.threads, "Worker threads (default: hardware concurrency)");
  add("categories", f.categories, "Restrict rendering to these category ids");
  return o;
}

RunConfig resolve(const Flags& f, const FlagOptions& o) {
  RunConfig c;
  if (o.given("config")) apply_config_file(c, f.config);
  if (o.given("stride")) c.stride = f.stride;
  if (o.given("eta")) c.gc.eta = f.eta;
  if (o.given("phi")) c.gc.phi = f.phi;
  if (o.given("gt")) c.gt = *parse_gt_kind(f.gt);
  if (o.given("sigma")) c.sigma = f.sigma;
  if (o.given("threshold")) c.peaks.prob_threshold = f.threshold;
  if (o.given("min-distance")) c.peaks.min_distance = f.min_distance;
  if (o.given("window-radius")) c.peaks.window_radius = f.window_radius;
  if (o.given("lambda")) c.cost.lambda = f.lambda;
  if (o.given("mu")) c.cost.mu = f.mu;
  if (o.given("alpha")) c.alpha = f.alpha;
  if (o.given("gamma")) c.gamma = f.gamma;
  if (o.given("pos-weight")) c.pos_weight = f.pos_weight;
  if (o.given("fl-positive")) c.fl_positive = f.fl_positive;
  if (o.given("alpha-threshold")) c.alpha_threshold = f.alpha_threshold;
  if (o.given("aggregation")) c.aggregation = *parse_aggregation(f.aggregation);
  if (o.given("band")) {
    if (f.band == "all") {
      c.band.reset();
    } else {
      c.band = parse_size_band(f.band);
    }
  }
  if (o.given("threads")) c.threads = f.threads;
  if (o.given("categories")) c.categories = f.categories;
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Center-point heatmap toolkit"};
  app.require_subcommand(1);

  Flags flags;
  std::string coco, out_dir, heatmaps, preds, input, pred_dir, target_dir, file;
  std::string kernel_name = "bcfl";
  std::optional<std::int64_t> category;
  std::size_t channel = 0;
  bool gradcheck = false;
  std::uint64_t seed = 20240101;

  auto* gen = app.add_subcommand("gen", "Render target heatmaps from COCO annotations");
  auto gen_flags = add_run_flags(*gen, flags);
  gen->add_option("coco", coco, "COCO annotation file")->required();
  gen->add_option("out", out_dir, "Output directory")->required();

  auto* peaks = app.add_subcommand("peaks", "Extract center points as JSON lines");
  auto peaks_flags = add_run_flags(*peaks, flags);
  peaks->add_option("heatmaps", heatmaps, "Directory of .ochm files with sidecars")->required();

  auto* eval = app.add_subcommand("eval", "Score center points against COCO boxes");
  auto eval_flags = add_run_flags(*eval, flags);
  eval->add_option("coco", coco, "COCO annotation file")->required();
  eval->add_option("preds", preds, "Predicted points (JSON lines)")->required();

  auto* alpha = app.add_subcommand("alpha", "Estimate the loss balance factor");
  auto alpha_flags = add_run_flags(*alpha, flags);
  alpha->add_option("input", input, "COCO file or heatmap directory")->required();
  alpha->add_option("--category", category, "Only count this category");

  auto* loss = app.add_subcommand("loss", "Loss between predicted and target heatmaps");
  auto loss_flags = add_run_flags(*loss, flags);
  loss->add_option("pred", pred_dir, "Directory of predicted .ochm files")->required();
  loss->add_option("target", target_dir, "Directory of target .ochm files")->required();
  loss->add_option("--kernel", kernel_name, "fl, qfl, bcfl, wbce or wmse")
      ->check(CLI::IsMember({"fl", "qfl", "bcfl", "wbce", "wmse"}));
  loss->add_flag("--gradcheck", gradcheck, "Verify the bcfl gradient by finite differences");

  auto* viz = app.add_subcommand("viz", "Write one heatmap channel as an 8-bit PGM");
  viz->add_option("heatmap", file, ".ochm file")->required();
  viz->add_option("--channel", channel, "Channel index (default 0)");
  std::string viz_out;
  viz->add_option("--out", viz_out, "Output file (default: standard output)");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in reference checks");
  selftest->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (gen->parsed()) {
      cmd_gen(coco, out_dir, resolve(flags, gen_flags));
    } else if (peaks->parsed()) {
      cmd_peaks(heatmaps, resolve(flags, peaks_flags), std::cout);
    } else if (eval->parsed()) {
      cmd_eval(coco, preds, resolve(flags, eval_flags), std::cout);
    } else if (alpha->parsed()) {
      cmd_alpha(input, resolve(flags, alpha_flags), category, std::cout);
    } else if (loss->parsed()) {
      cmd_loss(pred_dir, target_dir, *parse_loss_kernel(kernel_name),
               resolve(flags, loss_flags), gradcheck, std::cout);
    } else if (viz->parsed()) {
      if (viz_out.empty()) {
        cmd_viz(file, channel, std::cout);
      } else {
        std::ofstream out(viz_out, std::ios::binary);
        if (!out) throw IoError("cannot write " + viz_out);
        cmd_viz(file, channel, out);
        if (!out.flush()) throw IoError("cannot write " + viz_out);
      }
    } else if (selftest->parsed()) {
      return cmd_selftest(std::cout, seed) ? 0 : 1;
    }
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to standard output");
  } catch (const Error& e) {
    std::cerr << "centerkit: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "centerkit: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kUsage);
  }
  return 0;
}
