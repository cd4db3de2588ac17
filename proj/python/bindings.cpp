// Python bindings over the core library. Heatmaps cross the boundary as
// float32 numpy arrays shaped (channels, height, width) or (height, width).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "centerkit/commands.hpp"
#include "centerkit/errors.hpp"
#include "centerkit/evaluate.hpp"
#include "centerkit/loss.hpp"
#include "centerkit/matching.hpp"
#include "centerkit/ochm.hpp"
#include "centerkit/peaks.hpp"

namespace py = pybind11;
using namespace centerkit;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<float> to_numpy(const Heatmap& map, bool squeeze) {
  std::vector<py::ssize_t> shape;
  if (!squeeze || map.channels() != 1) shape.push_back(static_cast<py::ssize_t>(map.channels()));
  shape.push_back(static_cast<py::ssize_t>(map.height()));
  shape.push_back(static_cast<py::ssize_t>(map.width()));
  py::array_t<float> out(shape);
  auto src = map.data();
  std::copy(src.begin(), src.end(), out.mutable_data());
  return out;
}

Heatmap from_numpy(const FloatArray& arr, float stride) {
  std::size_t c = 1, h = 0, w = 0;
  if (arr.ndim() == 2) {
    h = arr.shape(0);
    w = arr.shape(1);
  } else if (arr.ndim() == 3) {
    c = arr.shape(0);
    h = arr.shape(1);
    w = arr.shape(2);
  } else {
    throw py::value_error("heatmap must be 2-D or 3-D");
  }
  return Heatmap(c, h, w, stride, std::vector<float>(arr.data(), arr.data() + arr.size()));
}

std::vector<BoundingBox> boxes_from(const DoubleArray& arr) {
  if (arr.size() == 0) return {};
  if (arr.ndim() != 2 || arr.shape(1) != 4) throw py::value_error("boxes must be (N, 4) x, y, w, h");
  std::vector<BoundingBox> boxes(arr.shape(0));
  auto v = arr.unchecked<2>();
  for (py::ssize_t i = 0; i < arr.shape(0); ++i) {
    boxes[i].x = v(i, 0);
    boxes[i].y = v(i, 1);
    boxes[i].w = v(i, 2);
    boxes[i].h = v(i, 3);
  }
  return boxes;
}

ImageInfo image_of(int width, int height) {
  ImageInfo im;
  im.width = width;
  im.height = height;
  return im;
}

std::vector<CenterPoint> points_from(const std::vector<py::dict>& records) {
  std::vector<CenterPoint> out;
  out.reserve(records.size());
  for (const py::dict& r : records) {
    CenterPoint p;
    p.image_id = r["image_id"].cast<std::int64_t>();
    p.category_id = r["category_id"].cast<std::int64_t>();
    p.x = r["x"].cast<double>();
    p.y = r["y"].cast<double>();
    p.score = r["score"].cast<double>();
    out.push_back(p);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_centerkit, m) {
  m.doc() = "Center-point heatmaps, focal losses, matching and CAS scoring.";

  py::register_exception<Error>(m, "CenterkitError");

  m.def("gc_value",
        [](double l, double r, double t, double b, double eta, double phi) {
          return gc_value(l, r, t, b, {eta, phi});
        },
        py::arg("l"), py::arg("r"), py::arg("t"), py::arg("b"), py::arg("eta") = 0.5,
        py::arg("phi") = 0.5);

  m.def("render_gc",
        [](const DoubleArray& boxes, int width, int height, float stride, double eta,
           double phi) {
          const auto b = boxes_from(boxes);
          return to_numpy(render_gc(b, image_of(width, height), stride, {eta, phi}), true);
        },
        py::arg("boxes"), py::arg("width"), py::arg("height"), py::arg("stride") = 4.0f,
        py::arg("eta") = 0.5, py::arg("phi") = 0.5,
        "Render (N, 4) xywh boxes as a Generalized Centerness map (H', W').");

  m.def("render_gaussian",
        [](const DoubleArray& centers, int width, int height, float stride, double sigma) {
          std::vector<Point2> pts;
          if (centers.size() != 0) {
            if (centers.ndim() != 2 || centers.shape(1) != 2) {
              throw py::value_error("centers must be (N, 2)");
            }
            auto v = centers.unchecked<2>();
            for (py::ssize_t i = 0; i < centers.shape(0); ++i) pts.push_back({v(i, 0), v(i, 1)});
          }
          return to_numpy(render_gaussian(pts, image_of(width, height), stride, sigma), true);
        },
        py::arg("centers"), py::arg("width"), py::arg("height"), py::arg("stride") = 4.0f,
        py::arg("sigma") = 2.0);

  m.def("render_ellipse",
        [](const DoubleArray& boxes, int width, int height, float stride) {
          const auto b = boxes_from(boxes);
          return to_numpy(render_ellipse(b, image_of(width, height), stride), true);
        },
        py::arg("boxes"), py::arg("width"), py::arg("height"), py::arg("stride") = 4.0f);

  m.def("focal_loss", py::vectorize([](double p, int y, double alpha, double gamma) {
          return focal_loss(p, y, alpha, gamma);
        }),
        py::arg("p"), py::arg("y"), py::arg("alpha") = 0.25, py::arg("gamma") = 2.0);
  m.def("qfl", py::vectorize([](double p, double y, double gamma) { return qfl(p, y, gamma); }),
        py::arg("p"), py::arg("y"), py::arg("gamma") = 2.0);
  m.def("bcfl", py::vectorize([](double p, double y, double alpha, double gamma) {
          return bcfl(p, y, {alpha, gamma});
        }),
        py::arg("p"), py::arg("y"), py::arg("alpha") = 0.75, py::arg("gamma") = 2.0);
  m.def("bcfl_grad_p", py::vectorize([](double p, double y, double alpha, double gamma) {
          return bcfl_grad_p(p, y, {alpha, gamma});
        }),
        py::arg("p"), py::arg("y"), py::arg("alpha") = 0.75, py::arg("gamma") = 2.0);

  m.def("estimate_alpha",
        [](const std::vector<FloatArray>& maps, double threshold) {
          std::vector<Heatmap> hs;
          for (const auto& a : maps) hs.push_back(from_numpy(a, 1.0f));
          return estimate_alpha(hs, threshold);
        },
        py::arg("heatmaps"), py::arg("threshold") = 0.6);

  m.def("reduce_loss",
        [](const FloatArray& pred, const FloatArray& target, const std::string& kernel,
           double alpha, double gamma, double pos_weight) {
          auto k = parse_loss_kernel(kernel);
          if (!k) throw py::value_error("unknown loss kernel: " + kernel);
          LossParams params;
          params.alpha = alpha;
          params.gamma = gamma;
          params.pos_weight = pos_weight;
          const LossReport r =
              reduce_loss(from_numpy(pred, 1.0f), from_numpy(target, 1.0f), *k, params);
          py::dict out;
          out["total"] = r.total;
          out["per_channel"] = r.per_channel;
          out["cell_count"] = r.cell_count;
          return out;
        },
        py::arg("pred"), py::arg("target"), py::arg("kernel") = "bcfl", py::arg("alpha") = 0.75,
        py::arg("gamma") = 2.0, py::arg("pos_weight") = 1.0);

  m.def("find_peaks",
        [](const FloatArray& heatmap, float stride, double threshold, double min_distance,
           int window_radius) {
          const Heatmap map = from_numpy(heatmap, stride);
          if (map.channels() != 1) throw py::value_error("find_peaks takes a single channel");
          std::vector<std::tuple<double, double, double>> out;
          for (const CenterPoint& p :
               find_peaks(map, 0, {threshold, min_distance, window_radius})) {
            out.emplace_back(p.x, p.y, p.score);
          }
          return out;
        },
        py::arg("heatmap"), py::arg("stride") = 4.0f, py::arg("threshold") = 0.5,
        py::arg("min_distance") = 3.0, py::arg("window_radius") = 1,
        "Peaks of a 2-D map as (x, y, score) in image pixels, highest score first.");

  m.def("hungarian",
        [](const DoubleArray& cost) {
          if (cost.ndim() != 2) throw py::value_error("cost must be 2-D");
          CostMatrix c(cost.shape(0), cost.shape(1),
                       std::vector<double>(cost.data(), cost.data() + cost.size()));
          const Assignment a = hungarian(c);
          return py::make_tuple(a.pairs, a.total_cost);
        },
        py::arg("cost"), "Minimum-cost assignment: ([(row, col), ...], total_cost).");

  m.def("evaluate_json",
        [](const std::string& coco_json, const std::vector<py::dict>& points, double lambda,
           double mu, const std::string& aggregation, std::optional<std::string> band) {
          const Dataset ds = parse_coco(coco_json);
          const auto preds = points_from(points);
          EvalOptions opts;
          opts.cost = {lambda, mu};
          if (aggregation == "macro") {
            opts.aggregation = Aggregation::kMacro;
          } else if (aggregation != "pooled") {
            throw py::value_error("aggregation must be pooled or macro");
          }
          if (band && *band != "all") {
            opts.band = parse_size_band(*band);
            if (!opts.band) throw py::value_error("unknown band: " + *band);
          }
          py::gil_scoped_release release;
          return report_to_json(evaluate(ds, preds, opts));
        },
        py::arg("coco_json"), py::arg("points"), py::arg("lam") = 1.0, py::arg("mu") = 1.0,
        py::arg("aggregation") = "pooled", py::arg("band") = py::none());

  m.def("read_ochm",
        [](const std::string& path) {
          const Heatmap map = read_ochm(path);
          return py::make_tuple(to_numpy(map, false), map.stride());
        },
        py::arg("path"), "Returns (array of shape (C, H, W), stride).");
  m.def("write_ochm",
        [](const std::string& path, const FloatArray& data, float stride) {
          write_ochm(path, from_numpy(data, stride));
        },
        py::arg("path"), py::arg("data"), py::arg("stride"));

  m.def("selftest",
        [](std::uint64_t seed) {
          std::ostringstream out;
          bool ok = false;
          {
            py::gil_scoped_release release;
            ok = cmd_selftest(out, seed);
          }
          return py::make_tuple(ok, out.str());
        },
        py::arg("seed") = 20240101);
}
