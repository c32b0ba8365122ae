#include "skelrepair/metrics.hpp"

#include "skelrepair/distance.hpp"
#include "skelrepair/errors.hpp"
#include "skelrepair/hungarian.hpp"
#include "skelrepair/skeletonize.hpp"

#include <algorithm>
#include <cmath>

namespace skelrepair {

void MetricsConfig::validate() const {
  if (!(dist_tol_ratio > 0.0)) throw ConfigError("dist_tol_ratio must be > 0");
  if (!(oks_k > 0.0)) throw ConfigError("oks_k must be > 0");
  if (!(match_dist_max > 0.0)) throw ConfigError("match_dist_max must be > 0");
}

namespace {

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

// Fraction of `from` pixels whose squared distance to the other mask is <= tol2.
double matched_fraction(const BinaryMask& from, const Raster<double>& dist2_to_other, double tol2) {
  std::int64_t hit = 0;
  std::int64_t total = 0;
  for (int y = 0; y < from.height(); ++y)
    for (int x = 0; x < from.width(); ++x) {
      if (!from(x, y)) continue;
      ++total;
      if (dist2_to_other(y, x) <= tol2) ++hit;
    }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

FMeasure f_measure(const BinaryMask& pred, const BinaryMask& gt, const MetricsConfig& cfg) {
  cfg.validate();
  if (!same_dims(pred, gt)) throw DimensionError("f_measure: prediction and ground truth differ in size");
  const bool pred_empty = pred.count() == 0;
  const bool gt_empty = gt.count() == 0;
  if (pred_empty && gt_empty) return {1.0, 1.0, 1.0};
  if (pred_empty) return {0.0, 0.0, 0.0};
  if (gt_empty) return {0.0, 1.0, 0.0};

  const double tol = cfg.dist_tol_ratio * std::hypot(static_cast<double>(pred.width()), static_cast<double>(pred.height()));
  const double tol2 = tol * tol;
  FMeasure f;
  f.precision = matched_fraction(pred, squared_distance_transform(gt), tol2);
  f.recall = matched_fraction(gt, squared_distance_transform(pred), tol2);
  f.f_measure = harmonic(f.precision, f.recall);
  return f;
}

std::vector<PointMatch> match_points(const PointSet& pred, const PointSet& gt, PointKind kind, const MetricsConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> pi, gi;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i].kind == kind) pi.push_back(i);
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (gt[i].kind == kind) gi.push_back(i);
  if (pi.empty() || gi.empty()) return {};

  Eigen::MatrixXd dist(static_cast<Eigen::Index>(pi.size()), static_cast<Eigen::Index>(gi.size()));
  for (std::size_t r = 0; r < pi.size(); ++r)
    for (std::size_t c = 0; c < gi.size(); ++c)
      dist(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::sqrt(squared_distance(pred[pi[r]].pixel(), gt[gi[c]].pixel()));

  const std::vector<int> assignment = solve_assignment(dist);
  std::vector<PointMatch> out;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] < 0) continue;
    const double d = dist(static_cast<Eigen::Index>(r), assignment[r]);
    if (d > cfg.match_dist_max) continue;
    out.push_back({pi[r], gi[static_cast<std::size_t>(assignment[r])], d});
  }
  return out;
}

OksResult oks(const PointSet& pred, const PointSet& gt, double object_area, const MetricsConfig& cfg) {
  cfg.validate();
  if (!(object_area > 0.0)) throw ConfigError("object_area must be > 0");
  const double s2k2 = object_area * cfg.oks_k * cfg.oks_k;

  OksResult result;
  for (PointKind kind : {PointKind::endpoint, PointKind::junction}) {
    KindOks k;
    k.kind = kind;
    for (const Point& p : pred) k.n_pred += p.kind == kind ? 1 : 0;
    for (const Point& p : gt) k.n_gt += p.kind == kind ? 1 : 0;
    if (k.n_pred == 0 && k.n_gt == 0) continue;

    const auto matches = match_points(pred, gt, kind, cfg);
    double sum = 0.0;
    double dist_sum = 0.0;
    for (const PointMatch& m : matches) {
      sum += std::exp(-(m.distance * m.distance) / (2.0 * s2k2));
      dist_sum += m.distance;
    }
    k.n_matched = matches.size();
    k.precision = k.n_pred > 0 ? sum / static_cast<double>(k.n_pred) : 0.0;
    k.recall = k.n_gt > 0 ? sum / static_cast<double>(k.n_gt) : 0.0;
    k.oks = harmonic(k.precision, k.recall);
    k.mean_match_distance = matches.empty() ? 0.0 : dist_sum / static_cast<double>(matches.size());
    result.kinds.push_back(k);
  }
  if (!result.kinds.empty()) {
    result.oks = result.precision = result.recall = 0.0;
    for (const KindOks& k : result.kinds) {
      result.oks += k.oks;
      result.precision += k.precision;
      result.recall += k.recall;
    }
    const double n = static_cast<double>(result.kinds.size());
    result.oks /= n;
    result.precision /= n;
    result.recall /= n;
  }
  return result;
}

Connectivity connectivity_stats(const BinaryMask& mask) {
  const int n = components(mask).count();
  return {n, n == 1};
}

MetricsReport evaluate(const BinaryMask& pred, const BinaryMask& gt, const PointSet* pred_points,
                       const PointSet* gt_points, double object_area, const MetricsConfig& cfg) {
  MetricsReport report;
  report.skeleton = f_measure(pred, gt, cfg);
  report.connectivity = connectivity_stats(pred);
  if (pred_points && gt_points) report.points = oks(*pred_points, *gt_points, object_area, cfg);
  return report;
}

}  // namespace skelrepair
