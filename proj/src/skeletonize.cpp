#include "skelrepair/skeletonize.hpp"

#include "skelrepair/disjoint_set.hpp"

namespace skelrepair {

namespace {

// Working image with a one-pixel background frame so neighbour reads need no bounds checks.
class PaddedMask {
 public:
  explicit PaddedMask(const BinaryMask& mask) : w_(mask.width()), h_(mask.height()), px_(h_ + 2, w_ + 2) {
    px_.setZero();
    px_.block(1, 1, h_, w_) = mask.bits().cast<std::uint8_t>();
  }

  std::uint8_t& at(int x, int y) { return px_(y + 1, x + 1); }
  std::uint8_t at(int x, int y) const { return px_(y + 1, x + 1); }

  std::uint8_t neighbor(int x, int y, int k) const { return at(x + kNeighborDx[k], y + kNeighborDy[k]); }

  int degree(int x, int y) const {
    int n = 0;
    for (int k = 0; k < 8; ++k) n += neighbor(x, y, k);
    return n;
  }

  // Yokoi 8-connectivity number: sum over 4-neighbours k of xb_k - xb_k*xb_{k+1}*xb_{k+2},
  // where xb = 1 - x and indices wrap around the ring E, NE, N, ... SE.
  int connectivity(int x, int y) const {
    int nb[8];
    for (int k = 0; k < 8; ++k) nb[k] = 1 - neighbor(x, y, k);
    int c = 0;
    for (int k = 0; k < 8; k += 2) c += nb[k] - nb[k] * nb[(k + 1) % 8] * nb[(k + 2) % 8];
    return c;
  }

  BinaryMask to_mask() const { return BinaryMask(BinaryMask::Bits(px_.block(1, 1, h_, w_).cast<bool>())); }

  int width() const { return w_; }
  int height() const { return h_; }

 private:
  int w_;
  int h_;
  Raster<std::uint8_t> px_;
};

}  // namespace

BinaryMask thin(const BinaryMask& mask) {
  PaddedMask img(mask);
  // N, S, E, W: index into the neighbour ring.
  constexpr int kBorderSide[4] = {2, 6, 0, 4};
  std::vector<Pixel> border;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int side : kBorderSide) {
      border.clear();
      for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
          if (img.at(x, y) && !img.neighbor(x, y, side)) border.push_back({x, y});
      for (const Pixel& p : border) {
        if (img.degree(p.x, p.y) >= 2 && img.connectivity(p.x, p.y) == 1) {
          img.at(p.x, p.y) = 0;
          changed = true;
        }
      }
    }
  }
  return img.to_mask();
}

int neighbor_count(const BinaryMask& mask, int x, int y) {
  int n = 0;
  for (int k = 0; k < 8; ++k) n += mask.on(x + kNeighborDx[k], y + kNeighborDy[k]) ? 1 : 0;
  return n;
}

DegreeMap degree_map(const BinaryMask& mask) {
  Raster<std::int8_t> degree = Raster<std::int8_t>::Constant(mask.height(), mask.width(), -1);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask(x, y)) degree(y, x) = static_cast<std::int8_t>(neighbor_count(mask, x, y));
  return DegreeMap(std::move(degree));
}

PointSet extract_structural_points(const BinaryMask& mask) {
  PointSet out;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      const int d = neighbor_count(mask, x, y);
      if (d <= 1) out.add({x, y, PointKind::breakpoint, 1.0});
      else if (d >= 3) out.add({x, y, PointKind::junction, 1.0});
    }
  return out;
}

ComponentLabels components(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Raster<std::int32_t> labels = Raster<std::int32_t>::Zero(h, w);
  DisjointSet sets(1);

  // First pass: provisional labels from the already-visited half of the 8-neighbourhood (W, NW, N, NE).
  constexpr int kPrevDx[4] = {-1, -1, 0, 1};
  constexpr int kPrevDy[4] = {0, -1, -1, -1};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      std::int32_t label = 0;
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kPrevDx[k];
        const int ny = y + kPrevDy[k];
        if (!mask.on(nx, ny)) continue;
        const std::int32_t other = labels(ny, nx);
        label = label == 0 ? other : static_cast<std::int32_t>(sets.unite(label, other));
      }
      if (label == 0) label = static_cast<std::int32_t>(sets.add());
      labels(y, x) = label;
    }

  // Second pass: dense renumbering in raster order of first appearance.
  std::vector<std::int32_t> dense(sets.size(), 0);
  int count = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (labels(y, x) == 0) continue;
      const auto root = sets.find(static_cast<std::size_t>(labels(y, x)));
      if (dense[root] == 0) dense[root] = ++count;
      labels(y, x) = dense[root];
    }
  return ComponentLabels(std::move(labels), count);
}

}  // namespace skelrepair
