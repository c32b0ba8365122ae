#include "cli.hpp"

#include "skelrepair/errors.hpp"
#include "skelrepair/io.hpp"
#include "skelrepair/lighthouse.hpp"
#include "skelrepair/metrics.hpp"
#include "skelrepair/points.hpp"
#include "skelrepair/report.hpp"
#include "skelrepair/skeletonize.hpp"
#include "skelrepair/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

namespace skelrepair::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Flags named after config fields. Values given on the command line override the file.
class ConfigFlags {
 public:
  ConfigFlags(std::vector<std::string> doubles, std::vector<std::string> ints) {
    for (auto& k : doubles) doubles_[k];
    for (auto& k : ints) ints_[k];
  }

  void attach(CLI::App& app, const std::string& group) {
    for (auto& [key, value] : doubles_) app.add_option("--" + key, value)->group(group);
    for (auto& [key, value] : ints_) app.add_option("--" + key, value)->group(group);
  }

  Json overrides() const {
    Json out = Json::object();
    for (const auto& [key, value] : doubles_)
      if (value) out[key] = *value;
    for (const auto& [key, value] : ints_)
      if (value) out[key] = *value;
    return out;
  }

 private:
  std::map<std::string, std::optional<double>> doubles_;
  std::map<std::string, std::optional<int>> ints_;
};

ConfigFlags completion_flags() {
  return {{"tau", "alpha", "epsilon", "r", "theta_deg", "radius_ratio", "q1", "q2", "q3", "q_b"},
          {"tail_len", "max_passes"}};
}
ConfigFlags metrics_flags() { return {{"dist_tol_ratio", "oks_k", "match_dist_max"}, {}}; }
ConfigFlags peak_flags() { return {{"sigma", "peak_threshold", "nms_radius"}, {"window"}}; }

template <typename Config>
Config resolve(const std::string& file, const ConfigFlags& flags) {
  Config cfg;
  if (!file.empty()) apply_json(cfg, load_json(file));
  apply_json(cfg, flags.overrides());
  return cfg;
}

int default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError(std::string(kThreadsEnv) + " must be a positive integer");
    return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs job(i) for i in [0, n) on up to `threads` workers. Each index is owned by one worker.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

int exit_code_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const IoError&) {
    return kIo;
  } catch (const FormatError&) {
    return kFormat;
  } catch (const DimensionError&) {
    return kFormat;
  } catch (const ConfigError&) {
    return kConfig;
  } catch (...) {
    return kUnexpected;
  }
}

std::string message_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// Subdirectories of `root` holding `marker`, sorted by name.
std::vector<fs::path> item_dirs(const fs::path& root, const std::string& marker) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / marker)) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

Json pixels_json(const std::vector<Pixel>& pixels) {
  Json out = Json::array();
  for (const Pixel& p : pixels) out.push_back(Json::array({p.x, p.y}));
  return out;
}

// ---- skeletonize -------------------------------------------------------------------

struct SkeletonizeArgs {
  std::string field;
  std::string out;
  double tau = 0.5;
};

void add_skeletonize(CLI::App& app, SkeletonizeArgs& a) {
  app.add_option("--field", a.field, "confidence field (.lsf, .pgm or .png)")->required();
  app.add_option("--tau", a.tau, "threshold in [0,1]");
  app.add_option("--out", a.out, "output mask (.pgm)")->required();
}

int run_skeletonize(const SkeletonizeArgs& a, std::ostream& out) {
  const Field field = io::load_field(a.field);
  const BinaryMask mask = thin(threshold(field, a.tau));
  io::save_mask(mask, a.out);
  out << "skeleton: " << mask.count() << " pixels, " << components(mask).count() << " fragments\n";
  return kOk;
}

// ---- detect ------------------------------------------------------------------------

struct DetectArgs {
  std::string heatmap;
  std::string kind = "endpoint";
  std::string config;
  std::string out;
  ConfigFlags flags = peak_flags();
};

void add_detect(CLI::App& app, DetectArgs& a) {
  app.add_option("--heatmap", a.heatmap, "point heatmap (.lsf, .pgm or .png)")->required();
  app.add_option("--kind", a.kind, "kind of the detected points")->check(CLI::IsMember({"endpoint", "junction"}));
  app.add_option("--config", a.config, "peak detection config (JSON)");
  app.add_option("--out", a.out, "output points (.jsonl)")->required();
  a.flags.attach(app, "Peak detection");
}

int run_detect(const DetectArgs& a, std::ostream& out) {
  const auto cfg = resolve<PeakConfig>(a.config, a.flags);
  const Field heatmap = io::load_field(a.heatmap);
  const PointSet points = detect_peaks(heatmap, cfg, point_kind_from_string(a.kind));
  io::save_points(points, a.out);
  out << "detected " << points.size() << " " << a.kind << " points\n";
  return kOk;
}

// ---- complete ----------------------------------------------------------------------

struct CompleteArgs {
  std::string field;
  std::string hm_e;
  std::string hm_j;
  std::string points;
  std::string config;
  std::string peak_config;
  std::string corpus;
  std::string out_dir;
  std::optional<int> threads;
  ConfigFlags flags = completion_flags();
  ConfigFlags peak = peak_flags();
};

void add_complete(CLI::App& app, CompleteArgs& a) {
  app.add_option("--field", a.field, "skeleton confidence field");
  app.add_option("--hm-e", a.hm_e, "endpoint heatmap");
  app.add_option("--hm-j", a.hm_j, "junction heatmap");
  app.add_option("--points", a.points, "detected endpoints and junctions (.jsonl); detected from heatmaps if absent");
  app.add_option("--corpus", a.corpus, "directory of synthetic items to process in batch");
  app.add_option("--config", a.config, "completion config (JSON)");
  app.add_option("--peak-config", a.peak_config, "peak detection config (JSON)");
  app.add_option("--out-dir", a.out_dir, "output directory")->required();
  app.add_option("--threads", a.threads, "batch workers (default from SKELREPAIR_THREADS)");
  a.flags.attach(app, "Completion");
  a.peak.attach(app, "Peak detection");
}

struct CompleteInputs {
  fs::path field, hm_e, hm_j, points;
};

struct CompleteOutcome {
  CompletionReport report;
  std::array<double, 4> stage_seconds{};  // load, detect, complete, write
  bool detected = false;
};

CompleteOutcome complete_one(const CompleteInputs& in, const CompletionConfig& cfg, const PeakConfig& peak,
                             const fs::path& out_dir) {
  CompleteOutcome outcome;
  auto t = Clock::now();
  const Field field = io::load_field(in.field);
  const Field hm_e = io::load_field(in.hm_e);
  const Field hm_j = io::load_field(in.hm_j);
  if (!same_dims(field, hm_e) || !same_dims(field, hm_j)) throw DimensionError("field and heatmaps differ in size");
  std::optional<PointSet> given;
  if (!in.points.empty()) given = io::load_points(in.points, io::Dims{field.width(), field.height()});
  outcome.stage_seconds[0] = seconds_since(t);

  t = Clock::now();
  PointSet e_det, j_det;
  if (given) {
    e_det = given->of_kind(PointKind::endpoint);
    j_det = given->of_kind(PointKind::junction);
  } else {
    outcome.detected = true;
    e_det = detect_peaks(hm_e, peak, PointKind::endpoint);
    j_det = detect_peaks(hm_j, peak, PointKind::junction);
  }
  outcome.stage_seconds[1] = seconds_since(t);

  t = Clock::now();
  const auto result = complete_topology(field, hm_e, hm_j, e_det, j_det, cfg);
  outcome.report = result.report;
  outcome.stage_seconds[2] = seconds_since(t);

  t = Clock::now();
  ensure_dir(out_dir);
  io::save_mask(result.initial, out_dir / "s0.pgm");
  io::save_mask(result.skeleton, out_dir / "s_final.pgm");
  PointSet used = e_det;
  for (const Point& p : j_det) used.add(p);
  io::save_points(used, out_dir / "points.jsonl");
  Json report = {{"config", to_json(cfg)},
                 {"points_source", outcome.detected ? "detected" : "file"},
                 {"n_endpoints", e_det.size()},
                 {"n_junctions", j_det.size()}};
  report.update(to_json(result.report));
  save_json(report, out_dir / "report.json");
  outcome.stage_seconds[3] = seconds_since(t);
  return outcome;
}

int run_complete(const CompleteArgs& a, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve<CompletionConfig>(a.config, a.flags);
  const auto peak = resolve<PeakConfig>(a.peak_config, a.peak);
  const fs::path out_dir = a.out_dir;

  if (a.corpus.empty()) {
    if (a.field.empty() || a.hm_e.empty() || a.hm_j.empty())
      throw ConfigError("complete needs --field, --hm-e and --hm-j, or --corpus");
    const auto o = complete_one({a.field, a.hm_e, a.hm_j, a.points}, cfg, peak, out_dir);
    out << "fragments " << o.report.fragments_before << " -> " << o.report.fragments_after << ", "
        << o.report.paths_accepted << " paths accepted, " << o.report.paths_rejected << " rejected\n";
    return kOk;
  }

  if (!a.field.empty() || !a.points.empty()) throw ConfigError("--corpus cannot be combined with single-item inputs");
  const int threads = a.threads ? *a.threads : default_threads();
  if (threads < 1) throw ConfigError("--threads must be >= 1");
  const auto dirs = item_dirs(a.corpus, "field.lsf");
  ensure_dir(out_dir);

  struct Slot {
    std::optional<CompleteOutcome> outcome;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(dirs.size());
  parallel_for(dirs.size(), threads, [&](std::size_t i) {
    const fs::path& d = dirs[i];
    try {
      slots[i].outcome =
          complete_one({d / "field.lsf", d / "hm_e.lsf", d / "hm_j.lsf", {}}, cfg, peak, out_dir / d.filename());
    } catch (...) {
      slots[i].error = std::current_exception();
    }
  });

  int code = kOk;
  int single_before = 0, single_after = 0;
  Json items = Json::array();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    Json item = {{"name", dirs[i].filename().string()}, {"input", dirs[i].string()}};
    if (slots[i].error) {
      const int c = exit_code_of(slots[i].error);
      if (code == kOk) code = c;
      item["status"] = "failed";
      item["exit_code"] = c;
      item["error"] = message_of(slots[i].error);
      err << dirs[i].filename().string() << ": " << message_of(slots[i].error) << "\n";
    } else {
      const auto& o = *slots[i].outcome;
      single_before += o.report.fragments_before == 1;
      single_after += o.report.fragments_after == 1;
      item["status"] = "ok";
      item["fragments_before"] = o.report.fragments_before;
      item["fragments_after"] = o.report.fragments_after;
      item["paths_accepted"] = o.report.paths_accepted;
      item["stage_seconds"] = {{"load", o.stage_seconds[0]},
                               {"detect", o.stage_seconds[1]},
                               {"complete", o.stage_seconds[2]},
                               {"write", o.stage_seconds[3]}};
    }
    items.push_back(std::move(item));
  }
  Json manifest = {{"command", "complete"},
                   {"corpus", a.corpus},
                   {"config_path", a.config},
                   {"output_dir", out_dir.string()},
                   {"threads", threads},
                   {"config", to_json(cfg)},
                   {"items", std::move(items)}};
  save_json(manifest, out_dir / "manifest.json");
  out << dirs.size() << " items, single-connected " << single_before << " -> " << single_after << "\n";
  return code;
}

// ---- eval --------------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string pred_points;
  std::string gt_points;
  std::string gt_dir;
  std::string pred_dir;
  std::string pred_name = "s_final.pgm";
  std::string baseline_name;
  std::string config;
  std::optional<double> object_area;
  std::string out;
  ConfigFlags flags = metrics_flags();
};

void add_eval(CLI::App& app, EvalArgs& a) {
  app.add_option("--pred", a.pred, "predicted skeleton mask");
  app.add_option("--gt", a.gt, "ground-truth skeleton mask");
  app.add_option("--pred-points", a.pred_points, "predicted points (.jsonl)");
  app.add_option("--gt-points", a.gt_points, "ground-truth points (.jsonl)");
  app.add_option("--gt-dir", a.gt_dir, "corpus directory with gt.pgm (and points.jsonl) per item");
  app.add_option("--pred-dir", a.pred_dir, "directory with one prediction subdirectory per item");
  app.add_option("--pred-name", a.pred_name, "prediction mask file inside each item directory");
  app.add_option("--baseline-name", a.baseline_name, "mask before repair inside each item directory, e.g. s0.pgm");
  app.add_option("--config", a.config, "metrics config (JSON)");
  app.add_option("--object-area", a.object_area, "OKS object area in pixels (default width*height)");
  app.add_option("--out", a.out, "output report (.json)")->required();
  a.flags.attach(app, "Metrics");
}

MetricsReport eval_one(const fs::path& pred_path, const fs::path& gt_path, const fs::path& pred_pts,
                       const fs::path& gt_pts, std::optional<double> area, const MetricsConfig& cfg) {
  const BinaryMask pred = io::load_mask(pred_path);
  const BinaryMask gt = io::load_mask(gt_path);
  if (!same_dims(pred, gt)) throw DimensionError("prediction and ground truth differ in size");
  std::optional<PointSet> pp, gp;
  const io::Dims dims{gt.width(), gt.height()};
  if (!pred_pts.empty()) pp = io::load_points(pred_pts, dims);
  if (!gt_pts.empty()) gp = io::load_points(gt_pts, dims);
  const double object_area = area ? *area : static_cast<double>(gt.width()) * gt.height();
  return evaluate(pred, gt, pp ? &*pp : nullptr, gp ? &*gp : nullptr, object_area, cfg);
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const auto cfg = resolve<MetricsConfig>(a.config, a.flags);
  if (a.object_area && !(*a.object_area > 0.0)) throw ConfigError("--object-area must be > 0");

  if (a.gt_dir.empty()) {
    if (a.pred.empty() || a.gt.empty()) throw ConfigError("eval needs --pred and --gt, or --gt-dir and --pred-dir");
    const auto report = eval_one(a.pred, a.gt, a.pred_points, a.gt_points, a.object_area, cfg);
    Json j = {{"pred", a.pred}, {"gt", a.gt}, {"config", to_json(cfg)}};
    j.update(to_json(report));
    save_json(j, a.out);
    out << "f_measure " << report.skeleton.f_measure << ", fragments " << report.connectivity.n_fragments << "\n";
    return kOk;
  }

  if (a.pred_dir.empty()) throw ConfigError("--gt-dir requires --pred-dir");
  const auto dirs = item_dirs(a.gt_dir, "gt.pgm");
  const bool baseline = !a.baseline_name.empty();
  Json items = Json::array();
  double sum_p = 0, sum_r = 0, sum_f = 0, sum_fb = 0, sum_fragments = 0, sum_reduction = 0, sum_oks = 0;
  int single = 0, single_before = 0, improved = 0, n_oks = 0;
  for (const fs::path& d : dirs) {
    const fs::path pd = fs::path(a.pred_dir) / d.filename();
    const fs::path gt_pts = d / "points.jsonl";
    const fs::path pred_pts = pd / "points.jsonl";
    const bool with_points = fs::exists(gt_pts) && fs::exists(pred_pts);
    const auto r = eval_one(pd / a.pred_name, d / "gt.pgm", with_points ? pred_pts : fs::path{},
                            with_points ? gt_pts : fs::path{}, a.object_area, cfg);
    Json item = {{"name", d.filename().string()}};
    item.update(to_json(r));
    sum_p += r.skeleton.precision;
    sum_r += r.skeleton.recall;
    sum_f += r.skeleton.f_measure;
    sum_fragments += r.connectivity.n_fragments;
    single += r.connectivity.simply_connected;
    if (r.points) {
      sum_oks += r.points->oks;
      ++n_oks;
    }
    if (baseline) {
      const auto b = eval_one(pd / a.baseline_name, d / "gt.pgm", {}, {}, a.object_area, cfg);
      item["baseline"] = to_json(b);
      sum_fb += b.skeleton.f_measure;
      single_before += b.connectivity.simply_connected;
      const int reduction = b.connectivity.n_fragments - r.connectivity.n_fragments;
      sum_reduction += reduction;
      improved += reduction > 0;
    }
    items.push_back(std::move(item));
  }
  const double n = std::max<double>(1.0, static_cast<double>(dirs.size()));
  Json agg = {{"n_items", dirs.size()},
              {"mean_precision", sum_p / n},
              {"mean_recall", sum_r / n},
              {"mean_f_measure", sum_f / n},
              {"mean_fragments", sum_fragments / n},
              {"single_connected_ratio", single / n}};
  if (n_oks > 0) agg["mean_oks"] = sum_oks / n_oks;
  if (baseline) {
    agg["mean_f_measure_before"] = sum_fb / n;
    agg["single_connected_ratio_before"] = single_before / n;
    agg["single_connected_ratio_after"] = single / n;
    agg["improved_ratio"] = improved / n;
    agg["mean_fragment_reduction"] = sum_reduction / n;
  }
  Json j = {{"gt_dir", a.gt_dir},
            {"pred_dir", a.pred_dir},
            {"config", to_json(cfg)},
            {"aggregate", std::move(agg)},
            {"items", std::move(items)}};
  save_json(j, a.out);
  out << dirs.size() << " items, mean f_measure " << sum_f / n << ", single-connected " << single / n << "\n";
  return kOk;
}

// ---- synth -------------------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::string out_dir;
  std::optional<int> n;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  app.add_option("--config", a.config, "corpus config (JSON)");
  app.add_option("--n", a.n, "number of items");
  app.add_option("--seed", a.seed, "corpus seed");
  app.add_option("--out-dir", a.out_dir, "output directory")->required();
  app.add_option("--threads", a.threads, "workers (default from SKELREPAIR_THREADS)");
}

void write_item(const synth::SynthItem& item, const fs::path& dir) {
  ensure_dir(dir);
  io::save_mask(item.gt, dir / "gt.pgm");
  io::save_field(item.field, dir / "field.lsf");
  io::save_field(item.hm_e, dir / "hm_e.lsf");
  io::save_field(item.hm_j, dir / "hm_j.lsf");
  io::save_points(item.gt_points, dir / "points.jsonl");
  Json gaps = Json::array();
  for (const auto& g : item.gapped.gaps)
    gaps.push_back({{"length", g.pixels.size()}, {"residual", g.residual}, {"pixels", pixels_json(g.pixels)}});
  Json meta = {{"config", to_json(item.config)},
               {"n_gaps", item.gapped.gaps.size()},
               {"gt_fragments", components(item.gt).count()},
               {"gapped_fragments", components(item.gapped.mask).count()},
               {"gaps", std::move(gaps)}};
  save_json(meta, dir / "meta.json");
}

int run_synth(const SynthArgs& a, std::ostream& out) {
  synth::CorpusConfig cfg;
  if (!a.config.empty()) apply_json(cfg, load_json(a.config));
  if (a.n) cfg.n = *a.n;
  if (a.seed) cfg.seed = *a.seed;
  const auto configs = synth::corpus_item_configs(cfg);
  const int threads = a.threads ? *a.threads : default_threads();
  if (threads < 1) throw ConfigError("--threads must be >= 1");
  const fs::path root = a.out_dir;
  ensure_dir(root);

  std::vector<std::exception_ptr> errors(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t i) {
    try {
      char name[32];
      std::snprintf(name, sizeof name, "item_%04zu", i);
      write_item(synth::make_item(configs[i]), root / name);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  save_json({{"corpus", to_json(cfg)}, {"n_items", configs.size()}}, root / "corpus.json");
  out << "wrote " << configs.size() << " items to " << root.string() << "\n";
  return kOk;
}

// ---- overlay -----------------------------------------------------------------------

struct OverlayArgs {
  std::string mask;
  std::string field;
  std::string points;
  std::string out;
};

void add_overlay(CLI::App& app, OverlayArgs& a) {
  app.add_option("--mask", a.mask, "skeleton mask")->required();
  app.add_option("--field", a.field, "confidence field drawn as the grey background");
  app.add_option("--points", a.points, "points drawn as markers (.jsonl)");
  app.add_option("--out", a.out, "output image (.png)")->required();
}

struct Rgb {
  std::uint8_t r, g, b;
};

// Endpoints: red square outline. Junctions: blue plus. Breakpoints: yellow diagonal cross.
// Skeleton points: magenta dot.
std::vector<std::pair<int, int>> marker_offsets(PointKind kind) {
  std::vector<std::pair<int, int>> o;
  switch (kind) {
    case PointKind::endpoint:
      for (int d = -2; d <= 2; ++d) o.insert(o.end(), {{d, -2}, {d, 2}, {-2, d}, {2, d}});
      break;
    case PointKind::junction:
      for (int d = -3; d <= 3; ++d) o.insert(o.end(), {{d, 0}, {0, d}});
      break;
    case PointKind::breakpoint:
      for (int d = -2; d <= 2; ++d) o.insert(o.end(), {{d, d}, {d, -d}});
      break;
    case PointKind::skeleton:
      o.push_back({0, 0});
      break;
  }
  return o;
}

Rgb marker_color(PointKind kind) {
  switch (kind) {
    case PointKind::endpoint: return {255, 40, 40};
    case PointKind::junction: return {60, 110, 255};
    case PointKind::breakpoint: return {255, 220, 0};
    case PointKind::skeleton: return {255, 0, 255};
  }
  return {255, 255, 255};
}

int run_overlay(const OverlayArgs& a, std::ostream& out) {
  const BinaryMask mask = io::load_mask(a.mask);
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3, 0);
  const auto put = [&](int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    auto* px = &rgb[(static_cast<std::size_t>(y) * w + x) * 3];
    px[0] = c.r;
    px[1] = c.g;
    px[2] = c.b;
  };
  if (!a.field.empty()) {
    const Field field = io::load_field(a.field);
    if (!same_dims(field, mask)) throw DimensionError("field and mask differ in size");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const auto v = static_cast<std::uint8_t>(std::lround(160.0 * std::clamp<double>(field(x, y), 0.0, 1.0)));
        put(x, y, {v, v, v});
      }
  }
  const Rgb skeleton_color = a.field.empty() ? Rgb{255, 255, 255} : Rgb{0, 255, 0};
  for (const Pixel& p : mask.foreground()) put(p.x, p.y, skeleton_color);
  std::size_t n_points = 0;
  if (!a.points.empty()) {
    const PointSet points = io::load_points(a.points, io::Dims{w, h});
    n_points = points.size();
    for (const Point& p : points)
      for (const auto& [dx, dy] : marker_offsets(p.kind)) put(p.x + dx, p.y + dy, marker_color(p.kind));
  }
  io::save_png_rgb(a.out, w, h, rgb);
  out << "wrote " << a.out << " (" << w << "x" << h << ", " << n_points << " markers)\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skeleton repair by minimal-cost path completion, with evaluation and synthetic data tools"};
  app.name(args.empty() ? "skelrepair" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  SkeletonizeArgs sk;
  DetectArgs de;
  CompleteArgs co;
  EvalArgs ev;
  SynthArgs sy;
  OverlayArgs ov;
  auto* c_sk = app.add_subcommand("skeletonize", "threshold and thin a confidence field");
  auto* c_de = app.add_subcommand("detect", "detect points as heatmap peaks");
  auto* c_co = app.add_subcommand("complete", "repair a fragmented skeleton");
  auto* c_ev = app.add_subcommand("eval", "score skeletons and points against ground truth");
  auto* c_sy = app.add_subcommand("synth", "generate a synthetic corpus");
  auto* c_ov = app.add_subcommand("overlay", "render a mask and points to PNG");
  add_skeletonize(*c_sk, sk);
  add_detect(*c_de, de);
  add_complete(*c_co, co);
  add_eval(*c_ev, ev);
  add_synth(*c_sy, sy);
  add_overlay(*c_ov, ov);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*c_sk) return run_skeletonize(sk, out);
    if (*c_de) return run_detect(de, out);
    if (*c_co) return run_complete(co, out, err);
    if (*c_ev) return run_eval(ev, out);
    if (*c_sy) return run_synth(sy, out);
    if (*c_ov) return run_overlay(ov, out);
  } catch (...) {
    const auto e = std::current_exception();
    err << "error: " << message_of(e) << "\n";
    return exit_code_of(e);
  }
  return kUnexpected;
}

}  // namespace skelrepair::cli
