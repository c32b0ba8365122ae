#pragma once

#include "skelrepair/raster.hpp"

#include <optional>
#include <vector>

namespace skelrepair {

struct MetricsConfig {
  double dist_tol_ratio = 0.0075;  ///< F-measure match tolerance as a fraction of the image diagonal
  double oks_k = 0.065;            ///< OKS falloff constant
  double match_dist_max = 20.0;    ///< pixels; farther point matches are invalid

  void validate() const;
};

struct FMeasure {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

/// Tolerance-matched skeleton precision/recall: a pixel counts when its distance to the
/// other mask is <= dist_tol_ratio * diagonal. Empty vs empty scores (1, 1, 1).
FMeasure f_measure(const BinaryMask& pred, const BinaryMask& gt, const MetricsConfig& cfg);

struct PointMatch {
  std::size_t pred_idx = 0;  ///< index into the full predicted set
  std::size_t gt_idx = 0;    ///< index into the full ground-truth set
  double distance = 0.0;
};

/// Minimum-total-distance one-to-one matching between the points of `kind`, keeping
/// pairs no farther than match_dist_max. Sorted by pred_idx.
std::vector<PointMatch> match_points(const PointSet& pred, const PointSet& gt, PointKind kind, const MetricsConfig& cfg);

struct KindOks {
  PointKind kind = PointKind::endpoint;
  std::size_t n_pred = 0;
  std::size_t n_gt = 0;
  std::size_t n_matched = 0;
  double precision = 0.0;
  double recall = 0.0;
  double oks = 0.0;
  double mean_match_distance = 0.0;  ///< 0 when nothing matched
};

struct OksResult {
  double oks = 1.0;
  double precision = 1.0;
  double recall = 1.0;
  std::vector<KindOks> kinds;  ///< evaluated kinds; a kind absent from both sets is skipped
};

/// Per matched pair exp(-d^2 / (2 s^2 k^2)) with s = sqrt(object_area). Per kind,
/// precision = sum / n_pred and recall = sum / n_gt, combined harmonically; the result
/// averages the endpoint and junction kinds. With nothing to evaluate all scores are 1.
OksResult oks(const PointSet& pred, const PointSet& gt, double object_area, const MetricsConfig& cfg);

struct Connectivity {
  int n_fragments = 0;
  bool simply_connected = false;
};

Connectivity connectivity_stats(const BinaryMask& mask);

struct MetricsReport {
  FMeasure skeleton;
  Connectivity connectivity;
  std::optional<OksResult> points;
};

/// Skeleton and (when both point sets are given) keypoint metrics for one image.
MetricsReport evaluate(const BinaryMask& pred, const BinaryMask& gt, const PointSet* pred_points,
                       const PointSet* gt_points, double object_area, const MetricsConfig& cfg);

}  // namespace skelrepair
