#include "centerkit/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "centerkit/errors.hpp"
#include "json.hpp"

namespace centerkit {

const char* to_string(GtKind kind) {
  switch (kind) {
    case GtKind::kGc: return "gc";
    case GtKind::kGaussian: return "gaussian";
    case GtKind::kEllipse: return "ellipse";
  }
  return "?";
}

std::optional<GtKind> parse_gt_kind(std::string_view name) {
  if (name == "gc") return GtKind::kGc;
  if (name == "gaussian") return GtKind::kGaussian;
  if (name == "ellipse") return GtKind::kEllipse;
  return std::nullopt;
}

std::optional<Aggregation> parse_aggregation(std::string_view name) {
  if (name == "pooled") return Aggregation::kPooled;
  if (name == "macro") return Aggregation::kMacro;
  return std::nullopt;
}

void apply_config_json(RunConfig& config, std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ParseError("config: expected a JSON object");

  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "stride") {
        config.stride = value.get<float>();
      } else if (key == "eta") {
        config.gc.eta = value.get<double>();
      } else if (key == "phi") {
        config.gc.phi = value.get<double>();
      } else if (key == "gt") {
        auto kind = parse_gt_kind(value.get<std::string>());
        if (!kind) throw ParseError("config: unknown gt kind");
        config.gt = *kind;
      } else if (key == "sigma") {
        config.sigma = value.get<double>();
      } else if (key == "threshold") {
        config.peaks.prob_threshold = value.get<double>();
      } else if (key == "min_distance") {
        config.peaks.min_distance = value.get<double>();
      } else if (key == "window_radius") {
        config.peaks.window_radius = value.get<int>();
      } else if (key == "lambda") {
        config.cost.lambda = value.get<double>();
      } else if (key == "mu") {
        config.cost.mu = value.get<double>();
      } else if (key == "alpha") {
        config.alpha = value.get<double>();
      } else if (key == "gamma") {
        config.gamma = value.get<double>();
      } else if (key == "pos_weight") {
        config.pos_weight = value.get<double>();
      } else if (key == "fl_positive") {
        config.fl_positive = value.get<double>();
      } else if (key == "alpha_threshold") {
        config.alpha_threshold = value.get<double>();
      } else if (key == "aggregation") {
        auto agg = parse_aggregation(value.get<std::string>());
        if (!agg) throw ParseError("config: unknown aggregation");
        config.aggregation = *agg;
      } else if (key == "band") {
        const auto name = value.get<std::string>();
        if (name == "all") {
          config.band.reset();
        } else if (auto band = parse_size_band(name)) {
          config.band = band;
        } else {
          throw ParseError("config: unknown band");
        }
      } else if (key == "threads") {
        config.threads = value.get<unsigned>();
      } else if (key == "categories") {
        config.categories = value.get<std::vector<std::int64_t>>();
      } else {
        throw ParseError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_json(config, buf.str());
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(c.stride > 0.0f && std::isfinite(c.stride), "stride must be positive");
  require(c.gc.eta >= 0.0 && std::isfinite(c.gc.eta), "eta must be finite and >= 0");
  require(c.gc.phi >= 0.0 && std::isfinite(c.gc.phi), "phi must be finite and >= 0");
  require(c.sigma > 0.0, "sigma must be positive");
  require(c.peaks.prob_threshold >= 0.0, "threshold must be >= 0");
  require(c.peaks.min_distance >= 0.0, "min-distance must be >= 0");
  require(c.peaks.window_radius >= 1, "window-radius must be >= 1");
  require(c.cost.lambda >= 0.0 && c.cost.mu >= 0.0, "lambda and mu must be >= 0");
  require(c.cost.lambda > 0.0 || c.cost.mu > 0.0, "lambda and mu cannot both be 0");
  require(c.alpha >= 0.0 && c.alpha <= 1.0, "alpha must lie in [0, 1]");
  require(c.gamma >= 0.0 && std::isfinite(c.gamma), "gamma must be finite and >= 0");
  require(c.alpha_threshold >= 0.0 && c.alpha_threshold <= 1.0,
          "alpha threshold must lie in [0, 1]");
  require(c.threads >= 1, "threads must be >= 1");
}

}  // namespace centerkit
