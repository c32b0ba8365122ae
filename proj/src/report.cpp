#include "skelrepair/report.hpp"

#include "skelrepair/errors.hpp"
#include "skelrepair/io.hpp"

#include <fstream>
#include <iterator>
#include <functional>
#include <map>
#include <sstream>
#include <string>

namespace skelrepair {

namespace {

using Setter = std::function<void(const Json&)>;

template <typename T>
Setter set_number(T& target, const std::string& key) {
  return [&target, key](const Json& v) {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
      target = v.get<T>();
    } else {
      if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
      target = v.get<T>();
    }
  };
}

void apply(const Json& obj, const std::map<std::string, Setter>& setters, const char* what) {
  if (!obj.is_object()) throw ConfigError(std::string(what) + " config must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(std::string("unknown ") + what + " config key '" + key + "'");
    it->second(value);
  }
}

Json pixel_json(Pixel p) { return Json::array({p.x, p.y}); }

}  // namespace

Json to_json(const CompletionConfig& c) {
  return {{"tau", c.tau},       {"alpha", c.alpha},   {"epsilon", c.epsilon},
          {"r", c.r},           {"theta_deg", c.theta_deg}, {"radius_ratio", c.radius_ratio},
          {"q1", c.q1},         {"q2", c.q2},         {"q3", c.q3},
          {"q_b", c.q_b},       {"tail_len", c.tail_len}, {"max_passes", c.max_passes}};
}

Json to_json(const MetricsConfig& c) {
  return {{"dist_tol_ratio", c.dist_tol_ratio}, {"oks_k", c.oks_k}, {"match_dist_max", c.match_dist_max}};
}

Json to_json(const PeakConfig& c) {
  return {{"sigma", c.sigma}, {"window", c.window}, {"peak_threshold", c.peak_threshold}, {"nms_radius", c.nms_radius}};
}

Json to_json(const synth::SynthConfig& c) {
  return {{"width", c.width},
          {"height", c.height},
          {"shape", std::string(synth::to_string(c.shape))},
          {"n_gaps", c.n_gaps},
          {"gap_len_min", c.gap_len_min},
          {"gap_len_max", c.gap_len_max},
          {"field_sigma", c.field_sigma},
          {"noise_amp", c.noise_amp},
          {"seed", c.seed},
          {"gap_mode", std::string(synth::to_string(c.gap_mode))},
          {"gap_residual_min", c.gap_residual_min},
          {"gap_residual_max", c.gap_residual_max},
          {"heatmap_sigma", c.heatmap_sigma}};
}

Json to_json(const Point& p) {
  return {{"x", p.x}, {"y", p.y}, {"kind", std::string(to_string(p.kind))}, {"score", p.score}};
}

Json to_json(const CompletionReport& r) {
  Json records = Json::array();
  for (const PathRecord& rec : r.records) {
    Json pixels = Json::array();
    for (const Pixel& p : rec.pixels) pixels.push_back(pixel_json(p));
    records.push_back({{"pass", rec.pass},
                       {"start", pixel_json(rec.start)},
                       {"anchor", to_json(rec.anchor)},
                       {"length", rec.pixels.size()},
                       {"total_cost", rec.total_cost},
                       {"mean_cost", rec.verdict.mean_cost},
                       {"max_cost", rec.verdict.max_cost},
                       {"mean_junction_value", rec.verdict.mean_junction_value},
                       {"accepted", rec.verdict.accepted},
                       {"pixels", std::move(pixels)}});
  }
  return {{"fragments_before", r.fragments_before},
          {"fragments_after", r.fragments_after},
          {"paths_accepted", r.paths_accepted},
          {"paths_rejected", r.paths_rejected},
          {"passes_run", r.passes_run},
          {"records", std::move(records)}};
}

Json to_json(const FMeasure& f) {
  return {{"precision", f.precision}, {"recall", f.recall}, {"f_measure", f.f_measure}};
}

Json to_json(const OksResult& o) {
  Json kinds = Json::array();
  for (const KindOks& k : o.kinds)
    kinds.push_back({{"kind", std::string(to_string(k.kind))},
                     {"n_pred", k.n_pred},
                     {"n_gt", k.n_gt},
                     {"n_matched", k.n_matched},
                     {"precision", k.precision},
                     {"recall", k.recall},
                     {"oks", k.oks},
                     {"mean_match_distance", k.mean_match_distance}});
  return {{"oks", o.oks}, {"precision", o.precision}, {"recall", o.recall}, {"kinds", std::move(kinds)}};
}

Json to_json(const MetricsReport& r) {
  Json out = {{"skeleton", to_json(r.skeleton)},
              {"n_fragments", r.connectivity.n_fragments},
              {"simply_connected", r.connectivity.simply_connected}};
  if (r.points) out["points"] = to_json(*r.points);
  return out;
}

void apply_json(CompletionConfig& c, const Json& obj) {
  apply(obj,
        {{"tau", set_number(c.tau, "tau")},
         {"alpha", set_number(c.alpha, "alpha")},
         {"epsilon", set_number(c.epsilon, "epsilon")},
         {"r", set_number(c.r, "r")},
         {"theta_deg", set_number(c.theta_deg, "theta_deg")},
         {"radius_ratio", set_number(c.radius_ratio, "radius_ratio")},
         {"q1", set_number(c.q1, "q1")},
         {"q2", set_number(c.q2, "q2")},
         {"q3", set_number(c.q3, "q3")},
         {"q_b", set_number(c.q_b, "q_b")},
         {"tail_len", set_number(c.tail_len, "tail_len")},
         {"max_passes", set_number(c.max_passes, "max_passes")}},
        "completion");
  c.validate();
}

void apply_json(MetricsConfig& c, const Json& obj) {
  apply(obj,
        {{"dist_tol_ratio", set_number(c.dist_tol_ratio, "dist_tol_ratio")},
         {"oks_k", set_number(c.oks_k, "oks_k")},
         {"match_dist_max", set_number(c.match_dist_max, "match_dist_max")}},
        "metrics");
  c.validate();
}

void apply_json(PeakConfig& c, const Json& obj) {
  apply(obj,
        {{"sigma", set_number(c.sigma, "sigma")},
         {"window", set_number(c.window, "window")},
         {"peak_threshold", set_number(c.peak_threshold, "peak_threshold")},
         {"nms_radius", set_number(c.nms_radius, "nms_radius")}},
        "peak");
  c.validate();
}

void apply_json(synth::SynthConfig& c, const Json& obj) {
  const auto set_string = [](auto& target, auto parse, const char* key) {
    return [&target, parse, key](const Json& v) {
      if (!v.is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
      target = parse(v.get<std::string>());
    };
  };
  apply(obj,
        {{"width", set_number(c.width, "width")},
         {"height", set_number(c.height, "height")},
         {"shape", set_string(c.shape, [](const std::string& s) { return synth::shape_from_string(s); }, "shape")},
         {"n_gaps", set_number(c.n_gaps, "n_gaps")},
         {"gap_len_min", set_number(c.gap_len_min, "gap_len_min")},
         {"gap_len_max", set_number(c.gap_len_max, "gap_len_max")},
         {"field_sigma", set_number(c.field_sigma, "field_sigma")},
         {"noise_amp", set_number(c.noise_amp, "noise_amp")},
         {"seed", set_number(c.seed, "seed")},
         {"gap_mode",
          set_string(c.gap_mode, [](const std::string& s) { return synth::gap_mode_from_string(s); }, "gap_mode")},
         {"gap_residual_min", set_number(c.gap_residual_min, "gap_residual_min")},
         {"gap_residual_max", set_number(c.gap_residual_max, "gap_residual_max")},
         {"heatmap_sigma", set_number(c.heatmap_sigma, "heatmap_sigma")}},
        "synth");
  c.validate();
}

void apply_json(synth::CorpusConfig& c, const Json& obj) {
  if (!obj.is_object()) throw ConfigError("corpus config must be a JSON object");
  const auto shape_of = [](const Json& v) {
    if (!v.is_string()) throw ConfigError("shape names must be strings");
    return synth::shape_from_string(v.get<std::string>());
  };
  Json base = Json::object();
  for (const auto& [key, v] : obj.items()) {
    if (key == "n") {
      set_number(c.n, key)(v);
    } else if (key == "seed") {
      set_number(c.seed, key)(v);
    } else if (key == "shape") {
      c.shapes = {shape_of(v)};
    } else if (key == "shapes") {
      if (v == "mixed") {
        c.shapes.assign(std::begin(synth::kAllShapes), std::end(synth::kAllShapes));
      } else if (v.is_array()) {
        c.shapes.clear();
        for (const Json& name : v) c.shapes.push_back(shape_of(name));
      } else {
        throw ConfigError("config key 'shapes' must be a list of names or \"mixed\"");
      }
    } else if (key == "n_gaps") {
      set_number(c.n_gaps_min, key)(v);
      c.n_gaps_max = c.n_gaps_min;
    } else if (key == "n_gaps_min") {
      set_number(c.n_gaps_min, key)(v);
    } else if (key == "n_gaps_max") {
      set_number(c.n_gaps_max, key)(v);
    } else if (key == "noise_amp") {
      set_number(c.noise_min, key)(v);
      c.noise_max = c.noise_min;
    } else if (key == "noise_min") {
      set_number(c.noise_min, key)(v);
    } else if (key == "noise_max") {
      set_number(c.noise_max, key)(v);
    } else {
      base[key] = v;
    }
  }
  apply_json(c.base, base);
  c.validate();
}

Json to_json(const synth::CorpusConfig& c) {
  Json shapes = Json::array();
  for (synth::Shape s : c.shapes) shapes.push_back(std::string(synth::to_string(s)));
  Json base = to_json(c.base);
  for (const char* key : {"shape", "n_gaps", "noise_amp", "seed"}) base.erase(key);
  Json out = {{"n", c.n},
              {"seed", c.seed},
              {"shapes", std::move(shapes)},
              {"n_gaps_min", c.n_gaps_min},
              {"n_gaps_max", c.n_gaps_max},
              {"noise_min", c.noise_min},
              {"noise_max", c.noise_max}};
  out.update(base);
  return out;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_json(const Json& value, const std::filesystem::path& path) { io::write_text(path, value.dump(2) + "\n"); }

}  // namespace skelrepair
