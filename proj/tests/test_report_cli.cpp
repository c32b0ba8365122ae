#include "cli.hpp"
#include "skelrepair/errors.hpp"
#include "skelrepair/io.hpp"
#include "skelrepair/report.hpp"
#include "skelrepair/skeletonize.hpp"
#include "skelrepair/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace skelrepair;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "skelrepair");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json read_json(const fs::path& p) { return load_json(p); }

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

// A line with one soft gap, written as a single-item input set.
fs::path write_line_item(const fs::path& dir) {
  synth::SynthConfig cfg;
  cfg.shape = synth::Shape::line;
  cfg.seed = 3;
  cfg.n_gaps = 1;
  const auto item = synth::make_item(cfg);
  io::save_field(item.field, dir / "field.lsf");
  io::save_field(item.hm_e, dir / "hm_e.lsf");
  io::save_field(item.hm_j, dir / "hm_j.lsf");
  io::save_mask(item.gt, dir / "gt.pgm");
  io::save_points(item.gt_points, dir / "points.jsonl");
  return dir;
}

}  // namespace

TEST_CASE("config JSON round-trips and rejects unknown keys") {
  CompletionConfig c;
  c.alpha = 0.4;
  c.tail_len = 9;
  CompletionConfig back;
  apply_json(back, to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(apply_json(back, Json{{"alpah", 0.5}}), ConfigError);
  CHECK_THROWS_AS(apply_json(back, Json{{"alpha", "high"}}), ConfigError);
  CHECK_THROWS_AS(apply_json(back, Json{{"alpha", 1.5}}), ConfigError);
  CHECK_THROWS_AS(apply_json(back, Json::array()), ConfigError);

  synth::CorpusConfig cc;
  apply_json(cc, Json{{"n", 7}, {"shape", "cross"}, {"n_gaps", 2}, {"field_sigma", 2.0}});
  CHECK(cc.n == 7);
  REQUIRE(cc.shapes.size() == 1);
  CHECK(cc.shapes[0] == synth::Shape::cross);
  CHECK(cc.n_gaps_min == 2);
  CHECK(cc.n_gaps_max == 2);
  CHECK(cc.base.field_sigma == 2.0);
  CHECK_THROWS_AS(apply_json(cc, Json{{"shape", "blob"}}), ConfigError);
  apply_json(cc, Json{{"shapes", "mixed"}});
  CHECK(cc.shapes.size() == 5);

  const auto dir = testing::temp_dir("json");
  write_file(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(load_json(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(load_json(dir / "absent.json"), IoError);
}

TEST_CASE("cli skeletonize") {
  const auto dir = testing::temp_dir("cli_skel");
  write_line_item(dir);
  auto r = invoke({"skeletonize", "--field", (dir / "field.lsf").string(), "--out", (dir / "s.pgm").string()});
  CHECK(r.code == cli::kOk);
  const auto s = io::load_mask(dir / "s.pgm");
  CHECK(s == thin(threshold(io::load_field(dir / "field.lsf"), 0.5)));

  CHECK(invoke({"skeletonize", "--field", (dir / "nope.lsf").string(), "--out", (dir / "s.pgm").string()}).code ==
        cli::kIo);
  CHECK(invoke({"skeletonize", "--field", (dir / "field.lsf").string(), "--tau", "1.2", "--out",
             (dir / "s.pgm").string()})
            .code == cli::kConfig);
  write_file(dir / "junk.lsf", "LSF1garbage");
  CHECK(invoke({"skeletonize", "--field", (dir / "junk.lsf").string(), "--out", (dir / "s.pgm").string()}).code ==
        cli::kFormat);
  CHECK(invoke({"skeletonize"}).code == cli::kConfig);
  CHECK(invoke({"frobnicate"}).code == cli::kConfig);
  CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("cli detect") {
  const auto dir = testing::temp_dir("cli_detect");
  write_line_item(dir);
  auto r = invoke({"detect", "--heatmap", (dir / "hm_e.lsf").string(), "--out", (dir / "e.jsonl").string()});
  REQUIRE(r.code == cli::kOk);
  const auto pts = io::load_points(dir / "e.jsonl");
  const auto truth = io::load_points(dir / "points.jsonl");
  CHECK(pts.size() == truth.of_kind(PointKind::endpoint).size());
  for (const Point& p : truth.of_kind(PointKind::endpoint)) CHECK(pts.contains(p.x, p.y, PointKind::endpoint));
  CHECK(invoke({"detect", "--heatmap", (dir / "hm_e.lsf").string(), "--kind", "corner", "--out",
             (dir / "e.jsonl").string()})
            .code == cli::kConfig);
  CHECK(invoke({"detect", "--heatmap", (dir / "hm_e.lsf").string(), "--window", "4", "--out",
             (dir / "e.jsonl").string()})
            .code == cli::kConfig);
}

TEST_CASE("cli complete repairs a single gapped line") {
  const auto dir = testing::temp_dir("cli_complete");
  write_line_item(dir);
  const auto out = dir / "out";
  auto r = invoke({"complete", "--field", (dir / "field.lsf").string(), "--hm-e", (dir / "hm_e.lsf").string(),
                "--hm-j", (dir / "hm_j.lsf").string(), "--out-dir", out.string()});
  REQUIRE(r.code == cli::kOk);
  const Json report = read_json(out / "report.json");
  CHECK(report["fragments_before"] == 2);
  CHECK(report["fragments_after"] == 1);
  CHECK(report["points_source"] == "detected");
  CHECK(components(io::load_mask(out / "s_final.pgm")).count() == 1);
  CHECK(components(io::load_mask(out / "s0.pgm")).count() == 2);
  CHECK(report["config"]["q1"].get<double>() == doctest::Approx(-std::log(0.1)));

  // Flags override the config file; a rejecting gate leaves the gap open.
  write_file(dir / "cfg.json", R"({"q1": 0.01})");
  r = invoke({"complete", "--field", (dir / "field.lsf").string(), "--hm-e", (dir / "hm_e.lsf").string(), "--hm-j",
           (dir / "hm_j.lsf").string(), "--config", (dir / "cfg.json").string(), "--out-dir",
           (dir / "strict").string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(read_json(dir / "strict" / "report.json")["fragments_after"] == 2);
  r = invoke({"complete", "--field", (dir / "field.lsf").string(), "--hm-e", (dir / "hm_e.lsf").string(), "--hm-j",
           (dir / "hm_j.lsf").string(), "--config", (dir / "cfg.json").string(), "--q1", "2.3", "--out-dir",
           (dir / "loose").string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(read_json(dir / "loose" / "report.json")["fragments_after"] == 1);

  // Given points replace detection.
  r = invoke({"complete", "--field", (dir / "field.lsf").string(), "--hm-e", (dir / "hm_e.lsf").string(), "--hm-j",
           (dir / "hm_j.lsf").string(), "--points", (dir / "points.jsonl").string(), "--out-dir",
           (dir / "given").string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(read_json(dir / "given" / "report.json")["points_source"] == "file");

  CHECK(invoke({"complete", "--field", (dir / "field.lsf").string(), "--hm-e", (dir / "absent.lsf").string(),
             "--hm-j", (dir / "hm_j.lsf").string(), "--out-dir", out.string()})
            .code == cli::kIo);
  CHECK(invoke({"complete", "--field", (dir / "field.lsf").string(), "--out-dir", out.string()}).code == cli::kConfig);
  write_file(dir / "unknown.json", R"({"beta": 1})");
  CHECK(invoke({"complete", "--field", (dir / "field.lsf").string(), "--hm-e", (dir / "hm_e.lsf").string(), "--hm-j",
             (dir / "hm_j.lsf").string(), "--config", (dir / "unknown.json").string(), "--out-dir", out.string()})
            .code == cli::kConfig);

  io::save_field(Field(8, 8, 0.0f, true), dir / "small.lsf");
  CHECK(invoke({"complete", "--field", (dir / "field.lsf").string(), "--hm-e", (dir / "small.lsf").string(), "--hm-j",
             (dir / "hm_j.lsf").string(), "--out-dir", out.string()})
            .code == cli::kFormat);
}

TEST_CASE("cli synth, complete and eval over a corpus") {
  const auto dir = testing::temp_dir("cli_corpus");
  const auto corpus = dir / "corpus";
  REQUIRE(invoke({"synth", "--n", "10", "--seed", "42", "--out-dir", corpus.string(), "--threads", "2"}).code ==
          cli::kOk);
  int n_items = 0;
  for (const auto& e : fs::directory_iterator(corpus)) n_items += e.is_directory();
  CHECK(n_items == 10);
  const Json meta = read_json(corpus / "item_0003" / "meta.json");
  CHECK(meta["gapped_fragments"].get<int>() == 1 + meta["n_gaps"].get<int>());
  CHECK(meta["gaps"].size() == meta["n_gaps"].get<std::size_t>());

  // Re-running with the same seed reproduces every file byte for byte.
  const auto again = dir / "again";
  REQUIRE(invoke({"synth", "--n", "10", "--seed", "42", "--out-dir", again.string(), "--threads", "1"}).code ==
          cli::kOk);
  for (const auto& e : fs::recursive_directory_iterator(corpus)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), corpus);
    if (rel == "corpus.json") continue;
    CHECK(io::read_bytes(e.path()) == io::read_bytes(again / rel));
  }

  const auto out = dir / "out";
  REQUIRE(invoke({"complete", "--corpus", corpus.string(), "--out-dir", out.string(), "--threads", "2"}).code ==
          cli::kOk);
  const Json manifest = read_json(out / "manifest.json");
  REQUIRE(manifest["items"].size() == 10);
  for (const auto& item : manifest["items"]) {
    CHECK(item["status"] == "ok");
    CHECK(item["fragments_after"].get<int>() <= item["fragments_before"].get<int>());
  }

  REQUIRE(invoke({"eval", "--gt-dir", corpus.string(), "--pred-dir", out.string(), "--baseline-name", "s0.pgm", "--out",
               (dir / "eval.json").string()})
              .code == cli::kOk);
  const Json ev = read_json(dir / "eval.json");
  const Json& agg = ev["aggregate"];
  CHECK(agg["n_items"] == 10);
  CHECK(agg.contains("mean_oks"));
  CHECK(agg["single_connected_ratio_before"].get<double>() == 0.0);
  CHECK(agg["single_connected_ratio_after"].get<double>() >= agg["single_connected_ratio_before"].get<double>());
  CHECK(agg["mean_fragment_reduction"].get<double>() >= 0.0);
  CHECK(agg["mean_f_measure"].get<double>() > agg["mean_f_measure_before"].get<double>());

  CHECK(invoke({"synth", "--n", "2", "--out-dir", (dir / "x").string()}).code == cli::kOk);
  write_file(dir / "bad_shape.json", R"({"shape": "blob"})");
  CHECK(invoke({"synth", "--config", (dir / "bad_shape.json").string(), "--out-dir", (dir / "y").string()}).code ==
        cli::kConfig);
  CHECK(invoke({"synth", "--n", "-1", "--out-dir", (dir / "z").string()}).code == cli::kConfig);
}

TEST_CASE("cli eval on single masks") {
  const auto dir = testing::temp_dir("cli_eval");
  write_line_item(dir);
  const auto gt = (dir / "gt.pgm").string();
  REQUIRE(invoke({"eval", "--pred", gt, "--gt", gt, "--pred-points", (dir / "points.jsonl").string(), "--gt-points",
               (dir / "points.jsonl").string(), "--out", (dir / "e.json").string()})
              .code == cli::kOk);
  const Json e = read_json(dir / "e.json");
  CHECK(e["skeleton"]["f_measure"].get<double>() == 1.0);
  CHECK(e["points"]["oks"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e["n_fragments"] == 1);
  CHECK(e["simply_connected"] == true);

  io::save_mask(BinaryMask(5, 5), dir / "small.pgm");
  CHECK(invoke({"eval", "--pred", (dir / "small.pgm").string(), "--gt", gt, "--out", (dir / "e.json").string()}).code ==
        cli::kFormat);
  CHECK(invoke({"eval", "--pred", gt, "--gt", gt, "--object-area", "0", "--out", (dir / "e.json").string()}).code ==
        cli::kConfig);
  CHECK(invoke({"eval", "--pred", (dir / "none.pgm").string(), "--gt", gt, "--out", (dir / "e.json").string()}).code ==
        cli::kIo);
}

TEST_CASE("cli overlay") {
  const auto dir = testing::temp_dir("cli_overlay");
  write_line_item(dir);
  const auto gt = (dir / "gt.pgm").string();
  REQUIRE(invoke({"overlay", "--mask", gt, "--out", (dir / "a.png").string()}).code == cli::kOk);
  const Field a = io::load_field(dir / "a.png");
  CHECK(a.width() == 160);
  REQUIRE(invoke({"overlay", "--mask", gt, "--field", (dir / "field.lsf").string(), "--points",
               (dir / "points.jsonl").string(), "--out", (dir / "b.png").string()})
              .code == cli::kOk);
  CHECK(fs::file_size(dir / "b.png") > 0);
  CHECK(invoke({"overlay", "--mask", (dir / "missing.pgm").string(), "--out", (dir / "c.png").string()}).code ==
        cli::kIo);
}

TEST_CASE("thread count comes from the environment") {
  const auto dir = testing::temp_dir("cli_env");
  ::setenv(cli::kThreadsEnv, "zero", 1);
  CHECK(invoke({"synth", "--n", "1", "--out-dir", (dir / "a").string()}).code == cli::kConfig);
  ::setenv(cli::kThreadsEnv, "2", 1);
  CHECK(invoke({"synth", "--n", "2", "--out-dir", (dir / "b").string()}).code == cli::kOk);
  ::unsetenv(cli::kThreadsEnv);
}
