#include "skelrepair/synth.hpp"

#include "skelrepair/distance.hpp"
#include "skelrepair/errors.hpp"
#include "skelrepair/points.hpp"
#include "skelrepair/skeletonize.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace skelrepair::synth {

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::line: return "line";
    case Shape::polyline: return "polyline";
    case Shape::cross: return "cross";
    case Shape::tree: return "tree";
    case Shape::random_walk: return "random_walk";
  }
  return "line";
}

Shape shape_from_string(std::string_view name) {
  for (Shape s : kAllShapes)
    if (to_string(s) == name) return s;
  throw ConfigError("unknown shape '" + std::string(name) + "'");
}

std::string_view to_string(GapMode mode) { return mode == GapMode::hard ? "hard" : "soft"; }

GapMode gap_mode_from_string(std::string_view name) {
  if (name == "hard") return GapMode::hard;
  if (name == "soft") return GapMode::soft;
  throw ConfigError("unknown gap_mode '" + std::string(name) + "'");
}

void SynthConfig::validate() const {
  if (width < 32 || height < 32) throw ConfigError("synthetic rasters must be at least 32x32");
  if (n_gaps < 0) throw ConfigError("n_gaps must be >= 0");
  if (gap_len_min < 1 || gap_len_max < gap_len_min) throw ConfigError("gap_len range must satisfy 1 <= min <= max");
  if (!(field_sigma > 0.0)) throw ConfigError("field_sigma must be > 0");
  if (!(noise_amp >= 0.0 && noise_amp < 1.0)) throw ConfigError("noise_amp must be in [0,1)");
  if (!(gap_residual_min >= 0.0 && gap_residual_max <= 1.0 && gap_residual_min <= gap_residual_max))
    throw ConfigError("gap_residual range must lie in [0,1]");
  if (!(heatmap_sigma > 0.0)) throw ConfigError("heatmap_sigma must be > 0");
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t v;
  do v = next();
  while (v >= limit);
  return lo + static_cast<int>(v % range);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMargin = 6;

std::vector<Pixel> bresenham(Pixel a, Pixel b) {
  std::vector<Pixel> out;
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
  const int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    out.push_back({x, y});
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
  return out;
}

Pixel round_point(double x, double y) { return {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))}; }

// Ordered strokes drawn on a raster, with a proximity test used to keep new strokes
// from touching unrelated earlier ones.
class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), owner_(Raster<int>::Constant(h, w, -1)) {}

  bool inside(Pixel p) const { return p.x >= kMargin && p.y >= kMargin && p.x < w_ - kMargin && p.y < h_ - kMargin; }

  // True if any pixel of `stroke` past index `skip` lies within Chebyshev distance
  // `clearance` of a pixel already drawn.
  bool crowded(const std::vector<Pixel>& stroke, std::size_t skip, int clearance) const {
    for (std::size_t i = skip; i < stroke.size(); ++i)
      for (int dy = -clearance; dy <= clearance; ++dy)
        for (int dx = -clearance; dx <= clearance; ++dx) {
          const int x = stroke[i].x + dx, y = stroke[i].y + dy;
          if (x >= 0 && y >= 0 && x < w_ && y < h_ && owner_(y, x) >= 0) return true;
        }
    return false;
  }

  void draw(const std::vector<Pixel>& stroke) {
    for (const Pixel& p : stroke) owner_(p.y, p.x) = 1;
  }

  BinaryMask mask() const { return BinaryMask(BinaryMask::Bits(owner_ >= 0)); }

 private:
  int w_, h_;
  Raster<int> owner_;
};

// Polyline through `vertices`, without repeating shared vertices.
std::vector<Pixel> polyline_pixels(const std::vector<Pixel>& vertices) {
  std::vector<Pixel> out;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    auto seg = bresenham(vertices[i - 1], vertices[i]);
    out.insert(out.end(), seg.begin() + (i == 1 ? 0 : 1), seg.end());
  }
  return out;
}

std::vector<Pixel> ray(Pixel from, double angle, double length) {
  return bresenham(from, round_point(from.x + length * std::cos(angle), from.y + length * std::sin(angle)));
}

bool all_inside(const Canvas& c, const std::vector<Pixel>& px) {
  return std::all_of(px.begin(), px.end(), [&](Pixel p) { return c.inside(p); });
}

std::optional<Canvas> draw_line(const SynthConfig& cfg, Rng& rng) {
  const double span = std::min(cfg.width, cfg.height);
  const double len = rng.uniform(0.55, 0.85) * span;
  const double angle = rng.uniform(0.0, kPi);
  const double cx = rng.uniform(0.35, 0.65) * cfg.width, cy = rng.uniform(0.35, 0.65) * cfg.height;
  const double hx = 0.5 * len * std::cos(angle), hy = 0.5 * len * std::sin(angle);
  Canvas c(cfg.width, cfg.height);
  const auto px = bresenham(round_point(cx - hx, cy - hy), round_point(cx + hx, cy + hy));
  if (!all_inside(c, px)) return std::nullopt;
  c.draw(px);
  return c;
}

std::optional<Canvas> draw_polyline(const SynthConfig& cfg, Rng& rng) {
  const double span = std::min(cfg.width, cfg.height);
  const int segments = rng.uniform_int(3, 4);
  double x = rng.uniform(0.2, 0.8) * cfg.width, y = rng.uniform(0.2, 0.8) * cfg.height;
  double heading = rng.uniform(0.0, 2.0 * kPi);
  std::vector<Pixel> vertices{round_point(x, y)};
  for (int s = 0; s < segments; ++s) {
    if (s > 0) heading += (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(15.0, 40.0) * kPi / 180.0;
    const double len = rng.uniform(0.22, 0.35) * span;
    x += len * std::cos(heading);
    y += len * std::sin(heading);
    vertices.push_back(round_point(x, y));
  }
  Canvas c(cfg.width, cfg.height);
  const auto px = polyline_pixels(vertices);
  if (!all_inside(c, px)) return std::nullopt;
  // Self-avoidance: each segment must keep clear of all but the previous one.
  std::vector<Pixel> drawn;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const auto seg = bresenham(vertices[i - 1], vertices[i]);
    Canvas older(cfg.width, cfg.height);
    const std::size_t keep = drawn.size() > 12 ? drawn.size() - 12 : 0;
    older.draw(std::vector<Pixel>(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(keep)));
    if (older.crowded(seg, 0, 4)) return std::nullopt;
    drawn.insert(drawn.end(), seg.begin(), seg.end());
  }
  c.draw(px);
  return c;
}

std::optional<Canvas> draw_cross(const SynthConfig& cfg, Rng& rng) {
  const double span = std::min(cfg.width, cfg.height);
  const Pixel centre = round_point(rng.uniform(0.4, 0.6) * cfg.width, rng.uniform(0.4, 0.6) * cfg.height);
  const bool diagonal = rng.uniform() < 0.5;
  Canvas c(cfg.width, cfg.height);
  const int ox[4] = {1, 0, -1, 0}, oy[4] = {0, 1, 0, -1};
  for (int arm = 0; arm < 4; ++arm) {
    const int len = static_cast<int>(rng.uniform(0.28, 0.42) * span);
    int dx = ox[arm], dy = oy[arm];
    if (diagonal) {
      const int rx = dx - dy, ry = dx + dy;  // rotate by 45 degrees onto the diagonals
      dx = rx;
      dy = ry;
    }
    std::vector<Pixel> px;
    for (int t = 0; t <= len; ++t) px.push_back({centre.x + t * dx, centre.y + t * dy});
    if (!all_inside(c, px)) return std::nullopt;
    c.draw(px);
  }
  return c;
}

std::optional<Canvas> draw_tree(const SynthConfig& cfg, Rng& rng) {
  const double span = std::min(cfg.width, cfg.height);
  auto trunk_canvas = draw_line(cfg, rng);
  if (!trunk_canvas) return std::nullopt;
  // Recover the trunk as an ordered stroke.
  const auto chains = trace_branches(trunk_canvas->mask());
  if (chains.size() != 1) return std::nullopt;
  const std::vector<Pixel>& trunk = chains.front();
  Canvas c(cfg.width, cfg.height);
  c.draw(trunk);

  const Pixel t0 = trunk.front(), t1 = trunk.back();
  const double trunk_angle = std::atan2(t1.y - t0.y, t1.x - t0.x);
  const int branches = rng.uniform_int(1, 2);
  std::vector<int> used;
  for (int b = 0; b < branches; ++b) {
    const int n = static_cast<int>(trunk.size());
    const int at = rng.uniform_int(n / 4, 3 * n / 4);
    for (int u : used)
      if (std::abs(u - at) < 25) return std::nullopt;
    used.push_back(at);
    const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double angle = trunk_angle + side * rng.uniform(45.0, 80.0) * kPi / 180.0;
    const auto branch = ray(trunk[static_cast<std::size_t>(at)], angle, rng.uniform(0.3, 0.42) * span);
    if (!all_inside(c, branch) || c.crowded(branch, 8, 3)) return std::nullopt;
    c.draw(branch);
  }
  return c;
}

std::optional<Canvas> draw_random_walk(const SynthConfig& cfg, Rng& rng) {
  const double span = std::min(cfg.width, cfg.height);
  double x = rng.uniform(0.25, 0.75) * cfg.width, y = rng.uniform(0.25, 0.75) * cfg.height;
  double heading = rng.uniform(0.0, 2.0 * kPi);
  double curvature = 0.0;
  const int steps = static_cast<int>(rng.uniform(0.8, 1.3) * span);
  std::vector<Pixel> path{round_point(x, y)};
  for (int i = 0; i < steps; ++i) {
    curvature = std::clamp(curvature + rng.uniform(-0.006, 0.006), -0.03, 0.03);
    heading += curvature;
    x += std::cos(heading);
    y += std::sin(heading);
    const Pixel p = round_point(x, y);
    if (p == path.back()) continue;
    const auto seg = bresenham(path.back(), p);
    path.insert(path.end(), seg.begin() + 1, seg.end());
  }
  Canvas c(cfg.width, cfg.height);
  if (!all_inside(c, path)) return std::nullopt;
  // Self-avoidance against everything but the most recent stretch of the walk.
  for (std::size_t i = 13; i < path.size(); ++i)
    for (std::size_t j = 0; j + 12 < i; ++j)
      if (chebyshev(path[i], path[j]) <= 4) return std::nullopt;
  c.draw(path);
  return c;
}

// Expected number of degree-1 pixels after thinning, used to reject accidental spurs.
std::size_t expected_endpoints(Shape shape, const BinaryMask& m) {
  switch (shape) {
    case Shape::line:
    case Shape::polyline:
    case Shape::random_walk: return 2;
    case Shape::cross: return 4;
    case Shape::tree: return 2 + (structural_ground_truth(m).of_kind(PointKind::junction).size());
  }
  return 2;
}

}  // namespace

BinaryMask gen_skeleton(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 1));
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::optional<Canvas> canvas;
    switch (cfg.shape) {
      case Shape::line: canvas = draw_line(cfg, rng); break;
      case Shape::polyline: canvas = draw_polyline(cfg, rng); break;
      case Shape::cross: canvas = draw_cross(cfg, rng); break;
      case Shape::tree: canvas = draw_tree(cfg, rng); break;
      case Shape::random_walk: canvas = draw_random_walk(cfg, rng); break;
    }
    if (!canvas) continue;
    BinaryMask m = thin(canvas->mask());
    if (components(m).count() != 1) continue;
    const auto pts = structural_ground_truth(m);
    if (pts.of_kind(PointKind::endpoint).size() != expected_endpoints(cfg.shape, m)) continue;
    return m;
  }
  throw ConfigError("could not draw a '" + std::string(to_string(cfg.shape)) + "' skeleton in a " +
                    std::to_string(cfg.width) + "x" + std::to_string(cfg.height) + " raster");
}

PointSet structural_ground_truth(const BinaryMask& skeleton) {
  PointSet out;
  const DegreeMap deg = degree_map(skeleton);
  Raster<char> done = Raster<char>::Zero(skeleton.height(), skeleton.width());
  for (int y = 0; y < skeleton.height(); ++y)
    for (int x = 0; x < skeleton.width(); ++x) {
      const auto d = deg(x, y);
      if (!d) continue;
      if (*d == 1) out.add({x, y, PointKind::endpoint, 1.0});
      if (*d < 3 || done(y, x)) continue;
      // Flood the 8-connected cluster of junction pixels.
      std::vector<Pixel> cluster{{x, y}}, stack{{x, y}};
      done(y, x) = 1;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nx = p.x + kNeighborDx[k], ny = p.y + kNeighborDy[k];
          if (!skeleton.on(nx, ny) || done(ny, nx) || deg(nx, ny).value_or(0) < 3) continue;
          done(ny, nx) = 1;
          cluster.push_back({nx, ny});
          stack.push_back({nx, ny});
        }
      }
      std::sort(cluster.begin(), cluster.end());
      Pixel best = cluster.front();
      for (const Pixel& p : cluster)
        if (*deg(p.x, p.y) > *deg(best.x, best.y)) best = p;
      out.add({best.x, best.y, PointKind::junction, 1.0});
    }
  return out;
}

namespace {

Field finish_field(Raster<double> base, double noise_amp, std::uint64_t seed) {
  if (noise_amp > 0.0) {
    Rng rng(mix_seed(seed, 3));
    for (Eigen::Index i = 0; i < base.size(); ++i) base.data()[i] += rng.uniform(-noise_amp, noise_amp);
  }
  return Field(base.max(0.0).min(1.0).cast<float>(), true);
}

Raster<double> gaussian_tube(const BinaryMask& gt, double sigma) {
  return (-squared_distance_transform(gt) / (2.0 * sigma * sigma)).exp();
}

}  // namespace

Field render_field(const BinaryMask& gt, double field_sigma, double noise_amp, std::uint64_t seed) {
  if (!(field_sigma > 0.0)) throw ConfigError("field_sigma must be > 0");
  return finish_field(gaussian_tube(gt, field_sigma), noise_amp, seed);
}

std::vector<std::vector<Pixel>> trace_branches(const BinaryMask& skeleton) {
  const DegreeMap deg = degree_map(skeleton);
  auto structural = [&](Pixel p) { return deg(p.x, p.y).value_or(0) != 2; };
  Raster<char> visited = Raster<char>::Zero(skeleton.height(), skeleton.width());
  std::vector<std::vector<Pixel>> chains;

  for (const Pixel& s : skeleton.foreground()) {
    if (!structural(s)) continue;
    for (int k = 0; k < 8; ++k) {
      Pixel cur{s.x + kNeighborDx[k], s.y + kNeighborDy[k]};
      if (!skeleton.on(cur.x, cur.y)) continue;
      if (structural(cur)) {
        if (s < cur) chains.push_back({s, cur});
        continue;
      }
      if (visited(cur.y, cur.x)) continue;
      std::vector<Pixel> chain{s};
      Pixel prev = s;
      while (true) {
        chain.push_back(cur);
        if (structural(cur)) break;
        visited(cur.y, cur.x) = 1;
        std::optional<Pixel> next;
        for (int j = 0; j < 8; ++j) {
          const Pixel n{cur.x + kNeighborDx[j], cur.y + kNeighborDy[j]};
          if (skeleton.on(n.x, n.y) && n != prev && !(visited(n.y, n.x) && !structural(n))) {
            next = n;
            break;
          }
        }
        if (!next) break;
        prev = cur;
        cur = *next;
      }
      chains.push_back(std::move(chain));
    }
  }
  return chains;
}

GappedSkeleton inject_gaps(const BinaryMask& gt, int n_gaps, int gap_len_min, int gap_len_max, std::uint64_t seed) {
  if (gap_len_min < 1 || gap_len_max < gap_len_min) throw ConfigError("gap_len range must satisfy 1 <= min <= max");
  if (n_gaps < 0) throw ConfigError("n_gaps must be >= 0");
  const int base_components = components(gt).count();
  if (base_components < 1) throw ConfigError("cannot cut gaps into an empty skeleton");
  const auto chains = trace_branches(gt);
  Rng rng(mix_seed(seed, 2));

  for (int attempt = 0; attempt < 100; ++attempt) {
    struct Cut {
      std::size_t chain;
      int start, len;
    };
    std::vector<Cut> cuts;
    bool failed = false;
    for (int g = 0; g < n_gaps && !failed; ++g) {
      const int len = rng.uniform_int(gap_len_min, gap_len_max);
      std::vector<Cut> options;
      for (std::size_t c = 0; c < chains.size(); ++c) {
        const int n = static_cast<int>(chains[c].size());
        for (int s = len + 2; s + len - 1 <= n - 1 - (len + 2); ++s) {
          bool clear = true;
          for (const Cut& o : cuts) {
            if (o.chain == c) {
              const int sep = std::max(len, o.len) + 2;
              if (s + len - 1 + sep > o.start - 1 && o.start + o.len - 1 + sep > s - 1) clear = false;
            } else {
              for (int i = 0; i < len && clear; ++i)
                for (int j = 0; j < o.len && clear; ++j)
                  if (chebyshev(chains[c][s + i], chains[o.chain][o.start + j]) <= 2) clear = false;
            }
            if (!clear) break;
          }
          if (clear) options.push_back({c, s, len});
        }
      }
      if (options.empty()) {
        failed = true;
        break;
      }
      cuts.push_back(options[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(options.size()) - 1))]);
    }
    if (failed) continue;

    GappedSkeleton out;
    BinaryMask::Bits bits = gt.bits();
    for (const Cut& cut : cuts) {
      GapSpan span;
      for (int i = 0; i < cut.len; ++i) {
        const Pixel p = chains[cut.chain][static_cast<std::size_t>(cut.start + i)];
        bits(p.y, p.x) = false;
        span.pixels.push_back(p);
      }
      out.gaps.push_back(std::move(span));
    }
    out.mask = BinaryMask(std::move(bits));
    if (components(out.mask).count() == base_components + n_gaps) return out;
  }
  throw ConfigError("skeleton too short for " + std::to_string(n_gaps) + " gaps of length " +
                    std::to_string(gap_len_min) + "-" + std::to_string(gap_len_max));
}

SynthItem make_item(const SynthConfig& cfg) {
  cfg.validate();
  SynthItem item;
  item.config = cfg;
  item.gt = gen_skeleton(cfg);
  item.gt_points = structural_ground_truth(item.gt);
  item.gapped = inject_gaps(item.gt, cfg.n_gaps, cfg.gap_len_min, cfg.gap_len_max, cfg.seed);

  Rng residual_rng(mix_seed(cfg.seed, 4));
  for (GapSpan& g : item.gapped.gaps) g.residual = residual_rng.uniform(cfg.gap_residual_min, cfg.gap_residual_max);

  if (cfg.gap_mode == GapMode::hard) {
    item.field = render_field(item.gapped.mask, cfg.field_sigma, cfg.noise_amp, cfg.seed);
  } else {
    // Pixels whose nearest intact skeleton pixel was cut are scaled by that gap's residual.
    Raster<double> base = gaussian_tube(item.gt, cfg.field_sigma);
    Raster<double> nearest = item.gapped.mask.count() > 0
                                 ? squared_distance_transform(item.gapped.mask)
                                 : Raster<double>::Constant(base.rows(), base.cols(), std::numeric_limits<double>::infinity());
    Raster<double> scale = Raster<double>::Ones(base.rows(), base.cols());
    for (const GapSpan& g : item.gapped.gaps) {
      const Raster<double> dg = squared_distance_transform(BinaryMask(item.gt.width(), item.gt.height()).stamped(g.pixels));
      for (Eigen::Index i = 0; i < base.size(); ++i)
        if (dg.data()[i] < nearest.data()[i]) {
          nearest.data()[i] = dg.data()[i];
          scale.data()[i] = g.residual;
        }
    }
    item.field = finish_field(base * scale, cfg.noise_amp, cfg.seed);
  }

  item.hm_e = render_heatmap<float>(item.gt_points.of_kind(PointKind::endpoint), cfg.width, cfg.height, cfg.heatmap_sigma);
  item.hm_j = render_heatmap<float>(item.gt_points.of_kind(PointKind::junction), cfg.width, cfg.height, cfg.heatmap_sigma);
  return item;
}

void CorpusConfig::validate() const {
  if (n < 0) throw ConfigError("n must be >= 0");
  if (shapes.empty()) throw ConfigError("shapes must not be empty");
  if (n_gaps_min < 0 || n_gaps_max < n_gaps_min) throw ConfigError("n_gaps range must satisfy 0 <= min <= max");
  if (!(noise_min >= 0.0 && noise_max < 1.0 && noise_min <= noise_max))
    throw ConfigError("noise range must lie in [0,1)");
  base.validate();
}

std::vector<SynthConfig> corpus_item_configs(const CorpusConfig& cfg) {
  cfg.validate();
  std::vector<SynthConfig> out;
  for (int i = 0; i < cfg.n; ++i) {
    Rng rng(mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(i)));
    SynthConfig item = cfg.base;
    item.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
    item.shape = cfg.shapes[static_cast<std::size_t>(i) % cfg.shapes.size()];
    item.n_gaps = rng.uniform_int(cfg.n_gaps_min, cfg.n_gaps_max);
    item.noise_amp = rng.uniform(cfg.noise_min, cfg.noise_max);
    item.validate();
    out.push_back(item);
  }
  return out;
}

}  // namespace skelrepair::synth
