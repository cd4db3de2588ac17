#include <gtest/gtest.h>

#include <sstream>

#include "centerkit/commands.hpp"
#include "centerkit/errors.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace centerkit;
using centerkit::testutil::TempDir;
using centerkit::testutil::read_text;
using centerkit::testutil::write_text;

namespace {

const char* kCoco = R"({
  "images": [{"id": 3, "width": 64, "height": 48}, {"id": 1, "width": 80, "height": 80}],
  "annotations": [
    {"id": 1, "image_id": 1, "category_id": 2, "bbox": [10, 10, 32, 32]},
    {"id": 2, "image_id": 3, "category_id": 5, "bbox": [20, 4, 24, 36]}
  ],
  "categories": [{"id": 5, "name": "five"}, {"id": 2, "name": "two"}]
})";

RunConfig single_thread() {
  RunConfig c;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(PointsJsonl, RoundtripAndBlankLines) {
  CenterPoint p;
  p.image_id = 4;
  p.category_id = 9;
  p.x = 12.5;
  p.y = 3.0;
  p.score = 0.75;
  const std::string line = point_to_jsonl(p);
  EXPECT_EQ(line, R"({"image_id":4,"category_id":9,"x":12.5,"y":3.0,"score":0.75})");
  const auto back = parse_points_jsonl("\n" + line + "\n\n" + line);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].image_id, 4);
  EXPECT_DOUBLE_EQ(back[1].x, 12.5);
  EXPECT_TRUE(parse_points_jsonl("").empty());
}

TEST(PointsJsonl, ErrorsNameTheLine) {
  try {
    parse_points_jsonl("{\"image_id\":1,\"category_id\":1,\"x\":1,\"y\":1,\"score\":0.5}\n{bad");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_points_jsonl(R"({"image_id":1,"category_id":1,"x":1,"y":1})"), ParseError);
  EXPECT_THROW(
      parse_points_jsonl(R"({"image_id":1,"category_id":1,"x":1,"y":1,"score":1.5})"),
      ParseError);
}

TEST(Config, JsonOverlayAndValidation) {
  RunConfig c;
  apply_config_json(c, R"({"stride": 8, "eta": 1.5, "gt": "ellipse", "band": "large",
                           "aggregation": "macro", "threshold": 0.3, "categories": [4, 2]})");
  EXPECT_EQ(c.stride, 8.0f);
  EXPECT_EQ(c.gc.eta, 1.5);
  EXPECT_EQ(c.gc.phi, 0.5);
  EXPECT_EQ(c.gt, GtKind::kEllipse);
  EXPECT_EQ(c.band, SizeBand::kLarge);
  EXPECT_EQ(c.aggregation, Aggregation::kMacro);
  EXPECT_EQ(c.peaks.prob_threshold, 0.3);
  EXPECT_EQ(c.categories, (std::vector<std::int64_t>{4, 2}));
  apply_config_json(c, R"({"band": "all"})");
  EXPECT_FALSE(c.band);

  EXPECT_THROW(apply_config_json(c, R"({"strid": 8})"), ParseError);
  EXPECT_THROW(apply_config_json(c, R"({"stride": "big"})"), ParseError);
  EXPECT_THROW(apply_config_json(c, "[1, 2]"), ParseError);
  EXPECT_THROW(apply_config_json(c, "{"), ParseError);

  RunConfig bad;
  bad.stride = 0.0f;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = RunConfig{};
  bad.cost = {0.0, 0.0};
  EXPECT_THROW(validate(bad), std::invalid_argument);
  EXPECT_NO_THROW(validate(RunConfig{}));
}

TEST(Config, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.stride, 4.0f);
  EXPECT_EQ(c.gc.eta, 0.5);
  EXPECT_EQ(c.gc.phi, 0.5);
  EXPECT_EQ(c.gamma, 2.0);
  EXPECT_EQ(c.alpha, 0.984);
  EXPECT_EQ(c.peaks.prob_threshold, 0.5);
  EXPECT_EQ(c.cost.lambda, 1.0);
  EXPECT_EQ(c.cost.mu, 1.0);
}

TEST(CmdGen, WritesOneFilePerImage) {
  TempDir dir("gen");
  write_text(dir / "coco.json", kCoco);
  EXPECT_EQ(cmd_gen(dir / "coco.json", dir / "out", single_thread()), 2u);
  const Heatmap a = read_ochm(dir / "out" / "1.ochm");
  EXPECT_EQ(a.channels(), 2u);
  EXPECT_EQ(a.width(), 20u);
  const ChannelLayout la = read_sidecar(dir / "out" / "1.json");
  EXPECT_EQ(la.image_id, 1);
  EXPECT_EQ(la.category_ids, (std::vector<std::int64_t>{2, 5}));
  // Image 1 only has category 2. Its center (26, 26) is a cell sample, so
  // channel 0 peaks at exactly 1; channel 1 is empty.
  float max0 = 0.0f, max1 = 0.0f, min0 = 1.0f;
  for (float v : a.channel(0)) {
    max0 = std::max(max0, v);
    min0 = std::min(min0, v);
  }
  for (float v : a.channel(1)) max1 = std::max(max1, v);
  EXPECT_EQ(max0, 1.0f);
  EXPECT_EQ(min0, 0.0f);
  EXPECT_EQ(max1, 0.0f);

  const Heatmap b = read_ochm(dir / "out" / "3.ochm");
  EXPECT_EQ(b.width(), 16u);
  EXPECT_EQ(b.height(), 12u);
}

TEST(CmdGen, CategoryScopeAndTargetKinds) {
  TempDir dir("gen-scope");
  write_text(dir / "coco.json", kCoco);
  RunConfig c = single_thread();
  c.categories = {5};
  c.gt = GtKind::kGaussian;
  cmd_gen(dir / "coco.json", dir / "out", c);
  EXPECT_EQ(read_ochm(dir / "out" / "3.ochm").channels(), 1u);
  EXPECT_EQ(read_sidecar(dir / "out" / "3.json").category_ids,
            (std::vector<std::int64_t>{5}));

  c.categories = {99};
  EXPECT_THROW(cmd_gen(dir / "coco.json", dir / "bad", c), ReferenceError);
}

TEST(CmdGen, EmptyAnnotationsGiveZeroRaster) {
  TempDir dir("gen-empty");
  write_text(dir / "coco.json", R"({"images": [{"id": 1, "width": 16, "height": 16}],
      "annotations": [], "categories": [{"id": 1, "name": "x"}]})");
  cmd_gen(dir / "coco.json", dir / "out", single_thread());
  const Heatmap map = read_ochm(dir / "out" / "1.ochm");
  for (float v : map.data()) EXPECT_EQ(v, 0.0f);
}

TEST(CmdGen, InputErrors) {
  TempDir dir("gen-err");
  EXPECT_THROW(cmd_gen(dir / "missing.json", dir / "out", single_thread()), IoError);
  write_text(dir / "bad.json", "{\"images\": [");
  EXPECT_THROW(cmd_gen(dir / "bad.json", dir / "out", single_thread()), ParseError);
}

TEST(CmdPeaks, SortedAndFiltered) {
  TempDir dir("peaks");
  Heatmap a(2, 8, 8, 4.0f);
  a.at(0, 1, 1) = 0.6f;
  a.at(0, 6, 6) = 0.9f;
  a.at(1, 3, 3) = 0.8f;
  write_ochm(dir / "7.ochm", a);
  write_sidecar(dir / "7.json", {7, 32, 32, {4, 2}});
  Heatmap b(1, 8, 8, 4.0f);
  b.at(0, 2, 5) = 1.0f;
  write_ochm(dir / "3.ochm", b);
  write_sidecar(dir / "3.json", {3, 32, 32, {4}});

  std::ostringstream out;
  cmd_peaks(dir.path(), single_thread(), out);
  const auto points = parse_points_jsonl(out.str());
  ASSERT_EQ(points.size(), 4u);
  EXPECT_EQ(points[0].image_id, 3);
  EXPECT_EQ(points[1].image_id, 7);
  EXPECT_EQ(points[1].category_id, 2);
  EXPECT_EQ(points[2].category_id, 4);
  EXPECT_FLOAT_EQ(points[2].score, 0.9f);
  EXPECT_FLOAT_EQ(points[3].score, 0.6f);

  RunConfig strict = single_thread();
  strict.peaks.prob_threshold = 1.1;
  std::ostringstream none;
  cmd_peaks(dir.path(), strict, none);
  EXPECT_EQ(none.str(), "");
}

TEST(CmdPeaks, Errors) {
  TempDir dir("peaks-err");
  write_ochm(dir / "1.ochm", Heatmap(1, 2, 2, 4.0f));
  std::ostringstream out;
  EXPECT_THROW(cmd_peaks(dir.path(), single_thread(), out), IoError);  // no sidecar
  write_sidecar(dir / "1.json", {1, 8, 8, {1}});
  write_text(dir / "2.ochm", "NOPE and more bytes than a header needs");
  write_sidecar(dir / "2.json", {2, 8, 8, {1}});
  EXPECT_THROW(cmd_peaks(dir.path(), single_thread(), out), FormatError);
  EXPECT_THROW(cmd_peaks(dir / "absent", single_thread(), out), IoError);
}

TEST(CmdEval, PerfectAndUnknownIds) {
  TempDir dir("eval");
  write_text(dir / "coco.json", kCoco);
  write_text(dir / "preds.jsonl",
             R"({"image_id":1,"category_id":2,"x":26,"y":26,"score":1})"
             "\n"
             R"({"image_id":3,"category_id":5,"x":32,"y":22,"score":1})"
             "\n");
  std::ostringstream out;
  cmd_eval(dir / "coco.json", dir / "preds.jsonl", single_thread(), out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["cas"], 1.0);
  EXPECT_EQ(j["f1"], 1.0);

  write_text(dir / "empty.jsonl", "");
  std::ostringstream empty;
  cmd_eval(dir / "coco.json", dir / "empty.jsonl", single_thread(), empty);
  EXPECT_EQ(nlohmann::json::parse(empty.str())["cas"], 0.0);

  write_text(dir / "bad.jsonl", R"({"image_id":42,"category_id":2,"x":1,"y":1,"score":1})");
  std::ostringstream bad;
  EXPECT_THROW(cmd_eval(dir / "coco.json", dir / "bad.jsonl", single_thread(), bad),
               ReferenceError);
}

TEST(CmdAlpha, FromDirectoryAndCoco) {
  TempDir dir("alpha");
  Heatmap m(2, 10, 10, 4.0f);
  for (int k = 0; k < 4; ++k) m.at(0, k, k) = 0.6f + 0.1f * k;
  m.at(1, 0, 0) = 1.0f;
  write_ochm(dir / "1.ochm", m);
  write_sidecar(dir / "1.json", {1, 40, 40, {8, 9}});

  std::ostringstream out;
  cmd_alpha(dir.path(), single_thread(), 8, out);
  auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["alpha"], 0.96);
  EXPECT_EQ(j["cells"], 100);
  EXPECT_EQ(j["negatives"], 96);

  std::ostringstream all;
  cmd_alpha(dir.path(), single_thread(), std::nullopt, all);
  EXPECT_EQ(nlohmann::json::parse(all.str())["alpha"], 195.0 / 200.0);

  write_text(dir / "coco.json", R"({"images": [{"id": 1, "width": 40, "height": 40}],
      "annotations": [], "categories": [{"id": 1, "name": "x"}]})");
  std::ostringstream coco;
  cmd_alpha(dir / "coco.json", single_thread(), std::nullopt, coco);
  EXPECT_EQ(nlohmann::json::parse(coco.str())["alpha"], 1.0);
}

TEST(CmdLoss, IdenticalDirsAndGradcheck) {
  TempDir dir("loss");
  Heatmap target(1, 6, 6, 4.0f), pred(1, 6, 6, 4.0f);
  for (std::size_t k = 0; k < target.size(); ++k) {
    target.data()[k] = static_cast<float>(k % 7) / 7.0f;
    pred.data()[k] = 0.05f + 0.9f * static_cast<float>((k * 5) % 11) / 11.0f;
  }
  std::filesystem::create_directories(dir / "t");
  std::filesystem::create_directories(dir / "p");
  write_ochm(dir / "t" / "1.ochm", target);
  write_ochm(dir / "p" / "1.ochm", pred);

  std::ostringstream same;
  cmd_loss(dir / "t", dir / "t", LossKernel::kBcfl, single_thread(), false, same);
  EXPECT_EQ(nlohmann::json::parse(same.str())["total"], 0.0);

  RunConfig half = single_thread();
  half.alpha = 0.5;
  std::ostringstream q, b;
  cmd_loss(dir / "p", dir / "t", LossKernel::kQfl, half, false, q);
  cmd_loss(dir / "p", dir / "t", LossKernel::kBcfl, half, true, b);
  const auto jq = nlohmann::json::parse(q.str());
  const auto jb = nlohmann::json::parse(b.str());
  EXPECT_NEAR(jb["total"].get<double>(), 0.5 * jq["total"].get<double>(), 1e-15);
  EXPECT_EQ(jb["cell_count"], 36);
  EXPECT_EQ(jb["kernel"], "bcfl");
  EXPECT_GT(jb["gradcheck"]["checked"].get<int>(), 0);
  EXPECT_LT(jb["gradcheck"]["max_rel_error"].get<double>(), 1e-5);

  std::ostringstream missing;
  std::filesystem::create_directories(dir / "empty");
  EXPECT_THROW(cmd_loss(dir / "p", dir / "empty", LossKernel::kBcfl, half, false, missing),
               IoError);
}

TEST(CmdViz, WritesPgm) {
  TempDir dir("viz");
  write_ochm(dir / "m.ochm", Heatmap(2, 1, 3, 4.0f, {0, 0, 0, 0.5f, 1.0f, 0.0f}));
  std::ostringstream out;
  cmd_viz(dir / "m.ochm", 1, out);
  EXPECT_EQ(out.str(), std::string("P5\n3 1\n255\n") + '\x80' + '\xff' + '\x00');
  EXPECT_THROW(cmd_viz(dir / "m.ochm", 2, out), std::invalid_argument);
}

TEST(CmdSelftest, Passes) {
  std::ostringstream out;
  EXPECT_TRUE(cmd_selftest(out));
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos) << out.str();
}
