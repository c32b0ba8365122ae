#pragma once

#include "skelrepair/raster.hpp"

#include <cstdint>
#include <iterator>
#include <random>
#include <string_view>
#include <vector>

namespace skelrepair::synth {

enum class Shape { line, polyline, cross, tree, random_walk };

std::string_view to_string(Shape shape);
/// Throws ConfigError for an unknown name.
Shape shape_from_string(std::string_view name);
inline constexpr Shape kAllShapes[] = {Shape::line, Shape::polyline, Shape::cross, Shape::tree, Shape::random_walk};

/// hard: gaps are cut from the ground truth before the confidence field is rendered,
/// so the field carries no evidence inside a gap. soft: the field is rendered from the
/// intact skeleton and scaled down to a residual level around each gap.
enum class GapMode { hard, soft };

std::string_view to_string(GapMode mode);
GapMode gap_mode_from_string(std::string_view name);

struct SynthConfig {
  int width = 160;
  int height = 160;
  Shape shape = Shape::line;
  int n_gaps = 1;
  int gap_len_min = 4;
  int gap_len_max = 15;
  double field_sigma = 1.5;      ///< tube width of the rendered confidence
  double noise_amp = 0.0;        ///< uniform noise in [-noise_amp, noise_amp], clamped
  std::uint64_t seed = 0;
  GapMode gap_mode = GapMode::soft;
  double gap_residual_min = 0.25;  ///< soft mode: confidence multiplier inside gaps
  double gap_residual_max = 0.38;
  double heatmap_sigma = 10.0;

  void validate() const;
};

/// std::mt19937_64 with distributions derived by hand: the standard library engine is
/// bit-exact across platforms, its distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  double uniform();                     ///< [0, 1)
  double uniform(double lo, double hi);  ///< [lo, hi)
  int uniform_int(int lo, int hi);      ///< [lo, hi], inclusive

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 step, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Thin single-component skeleton of the requested shape; deterministic per seed.
BinaryMask gen_skeleton(const SynthConfig& cfg);

/// True endpoints (degree 1) and junctions of a thin skeleton. Adjacent junction pixels
/// collapse to one point: the highest-degree pixel of the cluster, raster order on ties.
PointSet structural_ground_truth(const BinaryMask& skeleton);

/// exp(-D^2 / (2 field_sigma^2)) with D the distance to the nearest skeleton pixel,
/// plus clamped uniform noise. Noise is drawn from `seed` only when noise_amp > 0.
Field render_field(const BinaryMask& gt, double field_sigma, double noise_amp, std::uint64_t seed);

struct GapSpan {
  std::vector<Pixel> pixels;  ///< removed run, in curve order
  double residual = 0.0;      ///< soft-mode confidence multiplier
};

struct GappedSkeleton {
  BinaryMask mask;
  std::vector<GapSpan> gaps;
};

/// Removes n_gaps runs of consecutive curve pixels, each of a length drawn from
/// [gap_len_min, gap_len_max]. Every run lies at least length + 2 pixels along its branch
/// from a junction or endpoint, and runs are pairwise non-adjacent, so the component
/// count grows by exactly n_gaps. Throws ConfigError if the skeleton is too short.
GappedSkeleton inject_gaps(const BinaryMask& gt, int n_gaps, int gap_len_min, int gap_len_max, std::uint64_t seed);

/// Unbranched pixel chains between structural pixels (endpoints, junctions), in curve order.
/// Chains include their terminal pixels.
std::vector<std::vector<Pixel>> trace_branches(const BinaryMask& skeleton);

/// One corpus item: intact ground truth, its structural points, and the degraded inputs.
struct SynthItem {
  SynthConfig config;
  BinaryMask gt;
  PointSet gt_points;
  GappedSkeleton gapped;
  Field field;
  Field hm_e;
  Field hm_j;
};

SynthItem make_item(const SynthConfig& cfg);

/// Ranges a corpus is drawn from. Shapes cycle through `shapes` by item index; gap
/// count, gap noise and residuals are drawn per item from a stream of `seed`.
struct CorpusConfig {
  int n = 200;
  std::uint64_t seed = 42;
  std::vector<Shape> shapes{std::begin(kAllShapes), std::end(kAllShapes)};
  int n_gaps_min = 1;
  int n_gaps_max = 3;
  double noise_min = 0.0;
  double noise_max = 0.1;
  SynthConfig base;  ///< everything else, seed and shape and n_gaps and noise_amp overridden

  void validate() const;
};

std::vector<SynthConfig> corpus_item_configs(const CorpusConfig& cfg);

}  // namespace skelrepair::synth
