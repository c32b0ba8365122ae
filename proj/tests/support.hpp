#pragma once
// Test helpers: random inputs and brute-force reference implementations that share
// no code with the library.

#include "skelrepair/raster.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace testing {

using skelrepair::BinaryMask;
using skelrepair::Pixel;
using skelrepair::Raster;

inline BinaryMask mask_from_rows(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h == 0 ? 0 : static_cast<int>(rows[0].size());
  BinaryMask::Bits bits = BinaryMask::Bits::Constant(h, w, false);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) bits(y, x) = rows[y][x] == '#';
  return BinaryMask(bits);
}

inline BinaryMask mask_from_pixels(int w, int h, const std::vector<Pixel>& pixels) {
  return BinaryMask(w, h).stamped(pixels);
}

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  BinaryMask::Bits bits(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) bits(y, x) = on(rng);
  return BinaryMask(bits);
}

// Breadth-first flood fill over 8-neighbours.
inline int count_components_bfs(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  int n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!m(x, y) || seen[y * w + x]) continue;
      ++n;
      std::queue<Pixel> q;
      q.push({x, y});
      seen[y * w + x] = 1;
      while (!q.empty()) {
        const Pixel p = q.front();
        q.pop();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx, ny = p.y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || !m(nx, ny) || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            q.push({nx, ny});
          }
      }
    }
  return n;
}

inline int brute_degree(const BinaryMask& m, int x, int y) {
  int d = 0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if ((dx || dy) && m.on(x + dx, y + dy)) ++d;
  return d;
}

inline bool has_solid_2x2(const BinaryMask& m) {
  for (int y = 0; y + 1 < m.height(); ++y)
    for (int x = 0; x + 1 < m.width(); ++x)
      if (m(x, y) && m(x + 1, y) && m(x, y + 1) && m(x + 1, y + 1)) return true;
  return false;
}

inline bool subset_of(const BinaryMask& a, const BinaryMask& b) {
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      if (a(x, y) && !b(x, y)) return false;
  return true;
}

// Squared distance to the nearest foreground pixel by scanning all of them.
inline Raster<double> brute_edt(const BinaryMask& m) {
  const auto fg = m.foreground();
  Raster<double> out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (const Pixel& p : fg) best = std::min(best, skelrepair::squared_distance(p, {x, y}));
      out(y, x) = best;
    }
  return out;
}

// Minimum node-sum over every simple 8-connected path from s to t, by depth-first
// enumeration. The sum is accumulated in path order from s. Only for tiny grids.
inline double enumerate_path_cost(const Raster<double>& cost, Pixel s, Pixel t) {
  const int w = static_cast<int>(cost.cols()), h = static_cast<int>(cost.rows());
  std::vector<char> used(static_cast<std::size_t>(w) * h, 0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(Pixel, double)> dfs = [&](Pixel p, double acc) {
    if (p == t) {
      best = std::min(best, acc);
      return;
    }
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Pixel q{p.x + dx, p.y + dy};
        if ((!dx && !dy) || q.x < 0 || q.y < 0 || q.x >= w || q.y >= h || used[q.y * w + q.x]) continue;
        used[q.y * w + q.x] = 1;
        dfs(q, acc + cost(q.y, q.x));
        used[q.y * w + q.x] = 0;
      }
  };
  used[s.y * w + s.x] = 1;
  dfs(s, cost(s.y, s.x));
  return best;
}

// Single-source minimum node-sums to every pixel by Bellman-Ford relaxation: sweep all
// edges until no value changes. Costs are non-negative, so the walk optimum is the simple
// path optimum.
inline Raster<double> dp_path_costs(const Raster<double>& cost, Pixel s) {
  const auto h = cost.rows(), w = cost.cols();
  Raster<double> d = Raster<double>::Constant(h, w, std::numeric_limits<double>::infinity());
  d(s.y, s.x) = cost(s.y, s.x);
  for (bool changed = true; changed;) {
    changed = false;
    for (Eigen::Index y = 0; y < h; ++y)
      for (Eigen::Index x = 0; x < w; ++x) {
        if (!std::isfinite(d(y, x))) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Eigen::Index ny = y + dy, nx = x + dx;
            if ((!dx && !dy) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const double cand = d(y, x) + cost(ny, nx);
            if (cand < d(ny, nx)) {
              d(ny, nx) = cand;
              changed = true;
            }
          }
      }
  }
  return d;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("skelrepair_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
