#include "skelrepair/raster.hpp"

#include <algorithm>

namespace skelrepair {

std::vector<Pixel> BinaryMask::foreground() const {
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>(count()));
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if (bits_(y, x)) out.push_back({x, y});
  return out;
}

BinaryMask BinaryMask::stamped(std::span<const Pixel> pixels) const {
  Bits bits = bits_;
  for (const Pixel& p : pixels) {
    if (!contains(p)) throw std::out_of_range("stamped pixel outside mask");
    bits(p.y, p.x) = true;
  }
  return BinaryMask(std::move(bits));
}

BinaryMask operator|(const BinaryMask& a, const BinaryMask& b) {
  if (!same_dims(a, b)) throw std::invalid_argument("mask union requires equal dimensions");
  return BinaryMask(BinaryMask::Bits(a.bits_ || b.bits_));
}

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::endpoint: return "endpoint";
    case PointKind::junction: return "junction";
    case PointKind::breakpoint: return "breakpoint";
    case PointKind::skeleton: return "skeleton";
  }
  return "endpoint";
}

PointKind point_kind_from_string(std::string_view name) {
  if (name == "endpoint") return PointKind::endpoint;
  if (name == "junction") return PointKind::junction;
  if (name == "breakpoint") return PointKind::breakpoint;
  if (name == "skeleton") return PointKind::skeleton;
  throw std::invalid_argument("unknown point kind '" + std::string(name) + "'");
}

void PointSet::add(const Point& p) {
  if (!keys_.insert(key(p.x, p.y, p.kind)).second)
    throw std::invalid_argument("duplicate point (" + std::to_string(p.x) + "," + std::to_string(p.y) + "," +
                                std::string(to_string(p.kind)) + ")");
  points_.push_back(p);
}

PointSet PointSet::of_kind(PointKind kind) const {
  PointSet out;
  for (const Point& p : points_)
    if (p.kind == kind) out.add(p);
  return out;
}

PixelPath::PixelPath(std::vector<Pixel> pixels) : pixels_(std::move(pixels)) {
  if (pixels_.empty()) throw std::invalid_argument("empty pixel path");
  for (std::size_t i = 1; i < pixels_.size(); ++i)
    if (chebyshev(pixels_[i - 1], pixels_[i]) != 1) throw std::invalid_argument("pixel path step is not 8-adjacent");
  std::vector<Pixel> sorted = pixels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("pixel path repeats a pixel");
}

}  // namespace skelrepair
