#pragma once

// Lighthouse-guided topology completion: reconnects a fragmented skeleton by
// minimal-cost paths from breakpoints to structural anchors (other breakpoints
// and detected junctions) on a cost map derived from the skeleton confidence
// field and the point heatmaps, keeping only paths that pass a cost gate.

#include "skelrepair/disjoint_set.hpp"
#include "skelrepair/errors.hpp"
#include "skelrepair/raster.hpp"
#include "skelrepair/skeletonize.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

namespace skelrepair {

struct CompletionConfig {
  double tau = 0.5;            ///< threshold on the confidence field
  double alpha = 0.7;          ///< weight of the confidence field in the cost blend
  double epsilon = 1e-6;       ///< floor of the blended probability
  double r = 5.0;              ///< pixels; breakpoints closer than this to a detected endpoint are true ends
  double theta_deg = 90.0;     ///< full aperture of the search sector
  double radius_ratio = 0.3;   ///< search radius as a fraction of the image diagonal
  double q1 = -std::log(0.1);  ///< max mean cost along an accepted path
  double q2 = -std::log(0.05); ///< max single-pixel cost along an accepted path
  double q3 = 0.0;             ///< min mean junction-heatmap value along an accepted path
  double q_b = 0.9;            ///< quantile of the confidence field used for reinforcement
  int tail_len = 5;            ///< pixels walked back to estimate a breakpoint's direction
  int max_passes = 2;

  /// Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

/// Blended probability mapped to a non-negative cost: -ln(clamp(blend, epsilon, 1)).
inline double path_cost_value(double sp, double hm_e, double hm_j, double alpha, double epsilon) {
  const double blend = alpha * sp + (1.0 - alpha) * (hm_e + hm_j);
  return std::max(0.0, -std::log(std::clamp(blend, epsilon, 1.0)));
}

template <typename Scalar>
ScalarField<Scalar> build_cost_map(const ScalarField<Scalar>& sp, const ScalarField<Scalar>& hm_e,
                                   const ScalarField<Scalar>& hm_j, double alpha, double epsilon) {
  if (!same_dims(sp, hm_e) || !same_dims(sp, hm_j)) throw DimensionError("cost map inputs differ in size");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
  Raster<Scalar> cost(sp.height(), sp.width());
  for (Eigen::Index i = 0; i < cost.size(); ++i)
    cost.data()[i] = static_cast<Scalar>(path_cost_value(sp.values().data()[i], hm_e.values().data()[i],
                                                         hm_j.values().data()[i], alpha, epsilon));
  return ScalarField<Scalar>(std::move(cost));
}

/// Degree <= 1 pixels of a thinned skeleton that are not within distance < r of any endpoint.
PointSet extract_breakpoints(const BinaryMask& s0, const PointSet& endpoints, double r);

/// Unit vector pointing out of the curve at `breakpoint`: from the pixel reached by walking
/// back up to tail_len steps along the chain (stopping at a junction or a fork) towards the
/// breakpoint. None for isolated pixels and for pixels that are not chain ends.
std::optional<Eigen::Vector2d> estimate_direction(const BinaryMask& s0, Pixel breakpoint, int tail_len);

/// A lighthouse candidate with the connectivity class it belongs to.
struct Anchor {
  Point point;
  std::size_t component = 0;
};

/// Anchors at distance in (0, radius] from bp, on a different component, and (when a
/// direction is known) within theta_deg / 2 of it.
std::vector<Anchor> candidates_in_sector(Pixel bp, std::size_t bp_component, const std::optional<Eigen::Vector2d>& dir,
                                         std::span<const Anchor> anchors, double radius, double theta_deg);

/// Same test with components read from a labelling; an anchor on background (label 0)
/// counts as its own component.
PointSet candidates_in_sector(Pixel bp, const std::optional<Eigen::Vector2d>& dir, const PointSet& anchors,
                              const ComponentLabels& labels, double radius, double theta_deg);

struct CostedPath {
  PixelPath path;
  double total_cost = 0.0;
};

namespace detail {

/// Node-weighted Dijkstra on the 8-connected grid. The cost of a path is the sum of the
/// cost of every pixel on it, endpoints included, accumulated in order from the source.
/// Equal-distance ties are settled in raster order and an equal-cost relaxation keeps
/// the raster-smaller predecessor, so results never depend on heap internals.
template <typename Scalar>
class GridDijkstra {
 public:
  GridDijkstra(const ScalarField<Scalar>& cost, Pixel source)
      : cost_(cost), w_(cost.width()), n_(static_cast<std::size_t>(cost.width()) * cost.height()),
        dist_(n_, std::numeric_limits<double>::infinity()), pred_(n_, -1), settled_(n_, 0) {
    const std::size_t s = index(source);
    dist_[s] = static_cast<double>(cost_(source));
    heap_.push({dist_[s], static_cast<std::int64_t>(s)});
  }

  /// Runs until every target is settled (or the grid is exhausted).
  void settle(std::span<const Pixel> targets) {
    std::size_t remaining = 0;
    for (const Pixel& t : targets) remaining += settled_[index(t)] ? 0 : 1;
    std::vector<char> wanted(n_, 0);
    for (const Pixel& t : targets) wanted[index(t)] = 1;
    while (remaining > 0 && !heap_.empty()) {
      const Entry top = heap_.top();
      heap_.pop();
      const auto u = static_cast<std::size_t>(top.node);
      if (settled_[u] || top.dist > dist_[u]) continue;
      settled_[u] = 1;
      if (wanted[u]) --remaining;
      const int ux = static_cast<int>(u % w_);
      const int uy = static_cast<int>(u / w_);
      for (int k = 0; k < 8; ++k) {
        const int vx = ux + kNeighborDx[k];
        const int vy = uy + kNeighborDy[k];
        if (vx < 0 || vy < 0 || vx >= w_ || vy >= cost_.height()) continue;
        const std::size_t v = index({vx, vy});
        if (settled_[v]) continue;
        const double nd = dist_[u] + static_cast<double>(cost_(vx, vy));
        if (nd < dist_[v]) {
          dist_[v] = nd;
          pred_[v] = static_cast<std::int64_t>(u);
          heap_.push({nd, static_cast<std::int64_t>(v)});
        } else if (nd == dist_[v] && static_cast<std::int64_t>(u) < pred_[v]) {
          pred_[v] = static_cast<std::int64_t>(u);
        }
      }
    }
  }

  std::optional<CostedPath> path_to(Pixel target) const {
    const std::size_t t = index(target);
    if (!settled_[t]) return std::nullopt;
    std::vector<Pixel> pixels;
    for (std::int64_t v = static_cast<std::int64_t>(t); v >= 0; v = pred_[static_cast<std::size_t>(v)])
      pixels.push_back({static_cast<int>(v % w_), static_cast<int>(v / w_)});
    std::reverse(pixels.begin(), pixels.end());
    return CostedPath{PixelPath(std::move(pixels)), dist_[t]};
  }

 private:
  struct Entry {
    double dist;
    std::int64_t node;
    bool operator>(const Entry& o) const { return dist > o.dist || (dist == o.dist && node > o.node); }
  };

  std::size_t index(Pixel p) const { return static_cast<std::size_t>(p.y) * w_ + p.x; }

  const ScalarField<Scalar>& cost_;
  int w_;
  std::size_t n_;
  std::vector<double> dist_;
  std::vector<std::int64_t> pred_;
  std::vector<char> settled_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
};

}  // namespace detail

/// Minimum-sum path over 8-connected pixel sequences from start to goal, endpoints inclusive.
template <typename Scalar>
std::optional<CostedPath> min_cost_path(const ScalarField<Scalar>& cost, Pixel start, Pixel goal) {
  if (!cost.contains(start) || !cost.contains(goal)) throw std::out_of_range("path endpoint outside cost map");
  if (start == goal) throw std::invalid_argument("min_cost_path requires start != goal");
  detail::GridDijkstra<Scalar> search(cost, start);
  const Pixel goals[] = {goal};
  search.settle(goals);
  return search.path_to(goal);
}

struct AnchorChoice {
  Point anchor;
  CostedPath route;
};

/// The candidate whose optimal path from bp is cheapest; ties go to the raster-smaller anchor.
template <typename Scalar>
std::optional<AnchorChoice> select_anchor(Pixel bp, std::span<const Point> candidates, const ScalarField<Scalar>& cost) {
  if (candidates.empty()) return std::nullopt;
  std::vector<Pixel> goals;
  for (const Point& c : candidates) goals.push_back(c.pixel());
  detail::GridDijkstra<Scalar> search(cost, bp);
  search.settle(goals);

  std::optional<AnchorChoice> best;
  for (const Point& c : candidates) {
    auto route = search.path_to(c.pixel());
    if (!route) continue;
    if (!best || route->total_cost < best->route.total_cost ||
        (route->total_cost == best->route.total_cost && c.pixel() < best->anchor.pixel()))
      best = AnchorChoice{c, std::move(*route)};
  }
  return best;
}

template <typename Scalar>
std::optional<AnchorChoice> select_anchor(Pixel bp, const PointSet& candidates, const ScalarField<Scalar>& cost) {
  return select_anchor(bp, std::span<const Point>(candidates.points()), cost);
}

/// Path statistics checked by the acceptance gate.
struct PathVerdict {
  double mean_cost = 0.0;
  double max_cost = 0.0;
  double mean_junction_value = 0.0;
  bool accepted = false;
};

/// Accepted iff mean cost <= q1, max cost <= q2 and mean junction heatmap >= q3.
template <typename Scalar>
PathVerdict accept_path(const PixelPath& path, const ScalarField<Scalar>& cost, const ScalarField<Scalar>& hm_j,
                        double q1, double q2, double q3) {
  if (!same_dims(cost, hm_j)) throw DimensionError("cost map and junction heatmap differ in size");
  PathVerdict v;
  double sum_cost = 0.0;
  double sum_j = 0.0;
  for (const Pixel& p : path) {
    const double c = static_cast<double>(cost(p));
    sum_cost += c;
    v.max_cost = std::max(v.max_cost, c);
    sum_j += static_cast<double>(hm_j(p));
  }
  const double n = static_cast<double>(path.size());
  v.mean_cost = sum_cost / n;
  v.mean_junction_value = sum_j / n;
  v.accepted = v.mean_cost <= q1 && v.max_cost <= q2 && v.mean_junction_value >= q3;
  return v;
}

/// Linearly interpolated q-quantile of all field values.
template <typename Scalar>
double field_quantile(const ScalarField<Scalar>& field, double q) {
  std::vector<double> v(field.values().data(), field.values().data() + field.values().size());
  if (v.empty()) throw std::invalid_argument("quantile of an empty field");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Along the path: sp(p) = max{sp(p), quantile, min(1, hm_e(p) + hm_j(p))}. Other pixels unchanged.
template <typename Scalar>
ScalarField<Scalar> reinforce(const ScalarField<Scalar>& sp, const ScalarField<Scalar>& hm_e,
                              const ScalarField<Scalar>& hm_j, const PixelPath& path, double quantile) {
  if (!same_dims(sp, hm_e) || !same_dims(sp, hm_j)) throw DimensionError("reinforce inputs differ in size");
  Raster<Scalar> out = sp.values();
  for (const Pixel& p : path) {
    const double point_mass = std::min(1.0, static_cast<double>(hm_e(p)) + static_cast<double>(hm_j(p)));
    const double v = std::max({static_cast<double>(sp(p)), quantile, point_mass});
    out(p.y, p.x) = static_cast<Scalar>(v);
  }
  return ScalarField<Scalar>(std::move(out), sp.is_probability());
}

/// One evaluated connection attempt.
struct PathRecord {
  int pass = 1;
  Pixel start;
  Point anchor;
  std::vector<Pixel> pixels;
  double total_cost = 0.0;
  PathVerdict verdict;
};

struct CompletionReport {
  int fragments_before = 0;
  int fragments_after = 0;
  int paths_accepted = 0;
  int paths_rejected = 0;
  int passes_run = 0;
  std::vector<PathRecord> records;
};

template <typename Scalar>
struct CompletionResult {
  BinaryMask initial;           ///< thinned thresholded field before repair
  BinaryMask skeleton;          ///< final repaired skeleton
  ScalarField<Scalar> reinforced;
  CompletionReport report;
};

namespace detail {

// Anchors for one pass: current breakpoints plus detected junctions. A junction is
// attached to the component of the nearest skeleton pixel within Chebyshev distance
// 2 (raster order breaks ties); otherwise it is given a component of its own.
std::vector<Anchor> build_anchors(const PointSet& breakpoints, const PointSet& junctions, const ComponentLabels& labels,
                                  DisjointSet& sets);

}  // namespace detail

/// Full repair: threshold and thin the confidence field, then per pass visit every
/// breakpoint in raster order, connect it to its cheapest in-sector anchor on another
/// component, gate the path, and on acceptance reinforce the field, refresh the cost
/// map along the path, stamp the path and merge components. After each pass with at
/// least one accepted path the skeleton is rebuilt as thin(threshold(reinforced) |
/// accepted paths). Stops after max_passes or a pass that accepts nothing.
template <typename Scalar>
CompletionResult<Scalar> complete_topology(const ScalarField<Scalar>& sp, const ScalarField<Scalar>& hm_e,
                                           const ScalarField<Scalar>& hm_j, const PointSet& e_det,
                                           const PointSet& j_det, const CompletionConfig& cfg) {
  cfg.validate();
  if (!same_dims(sp, hm_e) || !same_dims(sp, hm_j)) throw DimensionError("completion inputs differ in size");
  for (const ScalarField<Scalar>* f : {&sp, &hm_e, &hm_j})
    if (!f->is_probability()) throw FormatError("completion inputs must be probability fields");
  for (const PointSet* ps : {&e_det, &j_det})
    for (const Point& p : *ps)
      if (!sp.contains(p.pixel())) throw DimensionError("detected point outside the field");

  CompletionResult<Scalar> result;
  CompletionReport& report = result.report;
  result.initial = thin(threshold(sp, cfg.tau));
  report.fragments_before = components(result.initial).count();

  ScalarField<Scalar> field = sp;
  ScalarField<Scalar> cost = build_cost_map(sp, hm_e, hm_j, cfg.alpha, cfg.epsilon);
  Raster<Scalar> cost_values = cost.values();
  BinaryMask skeleton = result.initial;
  std::vector<Pixel> accepted_pixels;
  const double radius = cfg.radius_ratio * std::hypot(static_cast<double>(sp.width()), static_cast<double>(sp.height()));

  for (int pass = 1; pass <= cfg.max_passes; ++pass) {
    report.passes_run = pass;
    const ComponentLabels labels = components(skeleton);
    const PointSet breakpoints = extract_breakpoints(skeleton, e_det, cfg.r);
    DisjointSet sets(static_cast<std::size_t>(labels.count()) + 1);
    const std::vector<Anchor> anchors = detail::build_anchors(breakpoints, j_det, labels, sets);
    const double quantile = field_quantile(field, cfg.q_b);

    BinaryMask working = skeleton;
    std::vector<char> consumed(breakpoints.size(), 0);
    int accepted_this_pass = 0;
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (consumed[i]) continue;
      const Pixel bp = breakpoints[i].pixel();
      const Anchor& self = anchors[i];
      const auto dir = estimate_direction(working, bp, cfg.tail_len);
      std::vector<Anchor> resolved = anchors;
      for (Anchor& a : resolved) a.component = sets.find(a.component);
      std::vector<Point> candidates;
      for (const Anchor& a : candidates_in_sector(bp, resolved[i].component, dir, resolved, radius, cfg.theta_deg))
        candidates.push_back(a.point);
      const auto choice = select_anchor(bp, std::span<const Point>(candidates), cost);
      if (!choice) continue;

      PathRecord rec;
      rec.pass = pass;
      rec.start = bp;
      rec.anchor = choice->anchor;
      rec.pixels = choice->route.path.pixels();
      rec.total_cost = choice->route.total_cost;
      rec.verdict = accept_path(choice->route.path, cost, hm_j, cfg.q1, cfg.q2, cfg.q3);
      report.records.push_back(rec);
      if (!rec.verdict.accepted) {
        ++report.paths_rejected;
        continue;
      }
      ++report.paths_accepted;
      ++accepted_this_pass;

      field = reinforce(field, hm_e, hm_j, choice->route.path, quantile);
      for (const Pixel& p : choice->route.path)
        cost_values(p.y, p.x) = static_cast<Scalar>(
            path_cost_value(field(p), hm_e(p), hm_j(p), cfg.alpha, cfg.epsilon));
      cost = ScalarField<Scalar>(cost_values);
      working = working.stamped(choice->route.path.pixels());
      accepted_pixels.insert(accepted_pixels.end(), rec.pixels.begin(), rec.pixels.end());

      const auto anchor_it = std::find_if(anchors.begin(), anchors.end(),
                                          [&](const Anchor& a) { return a.point == choice->anchor; });
      sets.unite(self.component, anchor_it->component);
      consumed[i] = 1;
      const auto anchor_index = static_cast<std::size_t>(anchor_it - anchors.begin());
      if (anchor_index < breakpoints.size()) consumed[anchor_index] = 1;
    }
    if (accepted_this_pass == 0) break;
    skeleton = thin(threshold(field, cfg.tau).stamped(accepted_pixels));
  }

  result.skeleton = skeleton;
  result.reinforced = field;
  report.fragments_after = components(skeleton).count();
  return result;
}

}  // namespace skelrepair
