#pragma once
// JSON views of configs and reports. Config objects are flat: keys are the field
// names, unknown keys and ill-typed values raise ConfigError.

#include "skelrepair/lighthouse.hpp"
#include "skelrepair/metrics.hpp"
#include "skelrepair/points.hpp"
#include "skelrepair/synth.hpp"

#include <json.hpp>

#include <filesystem>

namespace skelrepair {

using Json = nlohmann::ordered_json;

Json to_json(const CompletionConfig& cfg);
Json to_json(const MetricsConfig& cfg);
Json to_json(const PeakConfig& cfg);
Json to_json(const synth::SynthConfig& cfg);
Json to_json(const Point& p);
Json to_json(const CompletionReport& report);
Json to_json(const FMeasure& f);
Json to_json(const OksResult& o);
Json to_json(const MetricsReport& report);

/// Overwrites the fields named in `obj`; the result is validated.
void apply_json(CompletionConfig& cfg, const Json& obj);
void apply_json(MetricsConfig& cfg, const Json& obj);
void apply_json(PeakConfig& cfg, const Json& obj);
void apply_json(synth::SynthConfig& cfg, const Json& obj);
/// Corpus keys (n, seed, shapes, n_gaps_min/max, noise_min/max) plus any SynthConfig key
/// for the per-item base. "shape", "n_gaps" and "noise_amp" pin a range to one value;
/// "shapes" takes a list of names or "mixed".
void apply_json(synth::CorpusConfig& cfg, const Json& obj);
Json to_json(const synth::CorpusConfig& cfg);

/// Parses a JSON file; IoError when unreadable, ConfigError when malformed.
Json load_json(const std::filesystem::path& path);
/// Two-space indented, trailing newline.
void save_json(const Json& value, const std::filesystem::path& path);

}  // namespace skelrepair
