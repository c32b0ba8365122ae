#pragma once

#include "skelrepair/errors.hpp"
#include "skelrepair/raster.hpp"

#include <algorithm>
#include <cmath>

namespace skelrepair {

struct PeakConfig {
  double sigma = 10.0;          ///< Gaussian radius used to render point heatmaps.
  int window = 5;               ///< Side of the local-maximum window (odd, >= 3).
  double peak_threshold = 0.3;  ///< Minimum heatmap value of a peak.
  double nms_radius = 10.0;     ///< Kept peaks are strictly farther apart than this.

  void validate() const;
};

/// value(p) = max_q exp(-|p - q|^2 / (2 sigma^2)); probability field, all-zero for no points.
template <typename Scalar = float>
ScalarField<Scalar> render_heatmap(const PointSet& points, int width, int height, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("heatmap sigma must be positive");
  Raster<double> acc = Raster<double>::Zero(height, width);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (const Point& q : points) {
    if (q.x < 0 || q.y < 0 || q.x >= width || q.y >= height) throw std::out_of_range("heatmap point out of bounds");
    for (int y = 0; y < height; ++y) {
      const double dy = y - q.y;
      for (int x = 0; x < width; ++x) {
        const double dx = x - q.x;
        acc(y, x) = std::max(acc(y, x), std::exp(-(dx * dx + dy * dy) * inv));
      }
    }
  }
  return ScalarField<Scalar>(acc.cast<Scalar>(), true);
}

/// Local maxima of their window (ties count as maxima) with value >= peak_threshold,
/// greedily suppressed in descending score order, ties broken by raster order.
template <typename Scalar>
PointSet detect_peaks(const ScalarField<Scalar>& heatmap, const PeakConfig& cfg, PointKind kind) {
  cfg.validate();
  if (!heatmap.is_probability()) throw FormatError("peak detection requires a probability field");
  const int half = cfg.window / 2;
  const int w = heatmap.width();
  const int h = heatmap.height();

  std::vector<Point> peaks;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Scalar v = heatmap(x, y);
      if (static_cast<double>(v) < cfg.peak_threshold) continue;
      const int x0 = std::max(0, x - half), x1 = std::min(w - 1, x + half);
      const int y0 = std::max(0, y - half), y1 = std::min(h - 1, y + half);
      if (heatmap.values().block(y0, x0, y1 - y0 + 1, x1 - x0 + 1).maxCoeff() > v) continue;
      peaks.push_back({x, y, kind, static_cast<double>(v)});
    }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Point& a, const Point& b) { return a.score > b.score; });

  PointSet kept;
  const double r2 = cfg.nms_radius * cfg.nms_radius;
  for (const Point& p : peaks) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(),
                                        [&](const Point& k) { return squared_distance(k.pixel(), p.pixel()) <= r2; });
    if (!suppressed) kept.add(p);
  }
  return kept;
}

}  // namespace skelrepair
