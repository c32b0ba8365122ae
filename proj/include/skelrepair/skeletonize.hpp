#pragma once

#include "skelrepair/errors.hpp"
#include "skelrepair/raster.hpp"

#include <optional>

namespace skelrepair {

/// Per-pixel count of foreground 8-neighbours. Background pixels carry no degree.
class DegreeMap {
 public:
  explicit DegreeMap(Raster<std::int8_t> degree) : degree_(std::move(degree)) {}

  int width() const { return static_cast<int>(degree_.cols()); }
  int height() const { return static_cast<int>(degree_.rows()); }
  std::optional<int> operator()(int x, int y) const {
    const int d = degree_(y, x);
    return d < 0 ? std::nullopt : std::optional<int>(d);
  }
  /// Raw storage, -1 on background.
  const Raster<std::int8_t>& raw() const { return degree_; }

 private:
  Raster<std::int8_t> degree_;
};

/// 8-connected labelling: 0 is background, components are numbered 1..count()
/// in raster order of their first pixel.
class ComponentLabels {
 public:
  ComponentLabels(Raster<std::int32_t> labels, int count) : labels_(std::move(labels)), count_(count) {}

  int width() const { return static_cast<int>(labels_.cols()); }
  int height() const { return static_cast<int>(labels_.rows()); }
  int count() const { return count_; }
  int operator()(int x, int y) const { return labels_(y, x); }
  int operator()(Pixel p) const { return labels_(p.y, p.x); }
  const Raster<std::int32_t>& raw() const { return labels_; }

 private:
  Raster<std::int32_t> labels_;
  int count_ = 0;
};

/// bit(p) = field(p) > tau. Requires a probability field and tau in [0, 1].
template <typename Scalar>
BinaryMask threshold(const ScalarField<Scalar>& field, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0,1], got " + std::to_string(tau));
  if (!field.is_probability()) throw FormatError("threshold requires a probability field");
  return BinaryMask(BinaryMask::Bits(field.values().template cast<double>() > tau));
}

/// Topology-preserving thinning to unit width.
///
/// Four directional sub-iterations (north, south, east, west borders) repeat until
/// nothing changes. Each sub-iteration collects the border pixels of the current
/// mask, then visits them in raster order and deletes a pixel only if, in the mask
/// as it stands at that moment, it is 8-simple (Yokoi connectivity number 1) and
/// has at least two foreground neighbours. Simple-point deletion keeps the number
/// of 8-connected components and 4-connected holes; the neighbour rule keeps curve
/// ends. The result is a fixed point, so thin(thin(m)) == thin(m).
BinaryMask thin(const BinaryMask& mask);

int neighbor_count(const BinaryMask& mask, int x, int y);

DegreeMap degree_map(const BinaryMask& mask);

/// Degree 0 and 1 pixels become breakpoints, degree >= 3 pixels junctions; raster
/// order, score 1. Expects a thinned mask.
PointSet extract_structural_points(const BinaryMask& mask);

ComponentLabels components(const BinaryMask& mask);

}  // namespace skelrepair
