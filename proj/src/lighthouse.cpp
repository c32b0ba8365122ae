#include "skelrepair/lighthouse.hpp"

#include <numbers>
#include <string>

namespace skelrepair {

namespace {

void require(bool ok, const char* field, const std::string& range) {
  if (!ok) throw ConfigError(std::string(field) + " must be " + range);
}

}  // namespace

void CompletionConfig::validate() const {
  require(tau >= 0.0 && tau <= 1.0, "tau", "in [0,1]");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha", "in [0,1]");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon", "in (0,1)");
  require(r >= 0.0 && std::isfinite(r), "r", ">= 0");
  require(theta_deg > 0.0 && theta_deg <= 360.0, "theta_deg", "in (0,360]");
  require(radius_ratio > 0.0 && radius_ratio <= 1.0, "radius_ratio", "in (0,1]");
  require(q1 >= 0.0 && std::isfinite(q1), "q1", ">= 0");
  require(q2 >= 0.0 && std::isfinite(q2), "q2", ">= 0");
  require(q3 >= 0.0 && q3 <= 1.0, "q3", "in [0,1]");
  require(q_b >= 0.0 && q_b <= 1.0, "q_b", "in [0,1]");
  require(tail_len >= 1, "tail_len", ">= 1");
  require(max_passes >= 1, "max_passes", ">= 1");
}

PointSet extract_breakpoints(const BinaryMask& s0, const PointSet& endpoints, double r) {
  PointSet out;
  const double r2 = r * r;
  for (int y = 0; y < s0.height(); ++y)
    for (int x = 0; x < s0.width(); ++x) {
      if (!s0(x, y) || neighbor_count(s0, x, y) > 1) continue;
      const Pixel p{x, y};
      const bool true_end = std::any_of(endpoints.begin(), endpoints.end(),
                                        [&](const Point& e) { return squared_distance(p, e.pixel()) < r2; });
      if (!true_end) out.add({x, y, PointKind::breakpoint, 1.0});
    }
  return out;
}

std::optional<Eigen::Vector2d> estimate_direction(const BinaryMask& s0, Pixel breakpoint, int tail_len) {
  if (!s0.contains(breakpoint) || !s0(breakpoint)) return std::nullopt;
  if (neighbor_count(s0, breakpoint.x, breakpoint.y) != 1) return std::nullopt;

  std::vector<Pixel> visited{breakpoint};
  auto seen = [&](Pixel p) { return std::find(visited.begin(), visited.end(), p) != visited.end(); };
  Pixel cur = breakpoint;
  for (int step = 0; step < tail_len; ++step) {
    std::vector<Pixel> next;
    for (int k = 0; k < 8; ++k) {
      const Pixel n{cur.x + kNeighborDx[k], cur.y + kNeighborDy[k]};
      if (s0.on(n.x, n.y) && !seen(n)) next.push_back(n);
    }
    if (next.size() == 2 && chebyshev(next[0], next[1]) == 1) {
      // Staircase corner: both continuations touch. Skip the 4-adjacent corner pixel
      // and follow the diagonal one, which is farther along the chain.
      const bool first_is_axial = next[0].x == cur.x || next[0].y == cur.y;
      visited.push_back(first_is_axial ? next[0] : next[1]);
      next = {first_is_axial ? next[1] : next[0]};
    }
    // A fork (junction) or a dead end stops the walk at the current pixel.
    if (next.size() != 1) break;
    cur = next.front();
    visited.push_back(cur);
  }
  if (cur == breakpoint) return std::nullopt;
  Eigen::Vector2d d(breakpoint.x - cur.x, breakpoint.y - cur.y);
  return d.normalized();
}

std::vector<Anchor> candidates_in_sector(Pixel bp, std::size_t bp_component, const std::optional<Eigen::Vector2d>& dir,
                                         std::span<const Anchor> anchors, double radius, double theta_deg) {
  const double cos_half = std::cos(0.5 * theta_deg * std::numbers::pi / 180.0);
  std::vector<Anchor> out;
  for (const Anchor& a : anchors) {
    if (a.component == bp_component) continue;
    const Eigen::Vector2d v(a.point.x - bp.x, a.point.y - bp.y);
    const double dist = v.norm();
    if (dist <= 0.0 || dist > radius) continue;
    // Small slack so anchors exactly on the sector edge are kept despite rounding in cos().
    if (dir && dir->dot(v) / dist < cos_half - 1e-12) continue;
    out.push_back(a);
  }
  return out;
}

PointSet candidates_in_sector(Pixel bp, const std::optional<Eigen::Vector2d>& dir, const PointSet& anchors,
                              const ComponentLabels& labels, double radius, double theta_deg) {
  // Background anchors get ids past every label so each is its own component.
  std::vector<Anchor> tagged;
  std::size_t next_free = static_cast<std::size_t>(labels.count()) + 1;
  for (const Point& p : anchors) {
    const int label = labels(p.pixel());
    tagged.push_back({p, label > 0 ? static_cast<std::size_t>(label) : next_free++});
  }
  const int bp_label = labels(bp);
  const std::size_t bp_component = bp_label > 0 ? static_cast<std::size_t>(bp_label) : next_free++;
  PointSet out;
  for (const Anchor& a : candidates_in_sector(bp, bp_component, dir, tagged, radius, theta_deg)) out.add(a.point);
  return out;
}

namespace detail {

std::vector<Anchor> build_anchors(const PointSet& breakpoints, const PointSet& junctions, const ComponentLabels& labels,
                                  DisjointSet& sets) {
  std::vector<Anchor> anchors;
  anchors.reserve(breakpoints.size() + junctions.size());
  for (const Point& b : breakpoints) anchors.push_back({b, static_cast<std::size_t>(labels(b.pixel()))});
  for (const Point& j : junctions) {
    Point anchor = j;
    anchor.kind = PointKind::junction;
    int best_label = 0;
    int best_d2 = std::numeric_limits<int>::max();
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        const int x = j.x + dx;
        const int y = j.y + dy;
        if (x < 0 || y < 0 || x >= labels.width() || y >= labels.height() || labels(x, y) == 0) continue;
        const int d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
          best_d2 = d2;
          best_label = labels(x, y);
        }
      }
    const std::size_t component = best_label > 0 ? static_cast<std::size_t>(best_label) : sets.add();
    anchors.push_back({anchor, component});
  }
  return anchors;
}

}  // namespace detail

}  // namespace skelrepair
