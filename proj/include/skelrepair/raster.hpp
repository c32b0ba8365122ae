#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace skelrepair {

/// Row-major H x W storage shared by every grid type. Index as (row, col) = (y, x).
template <typename T>
using Raster = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Integer pixel centre, origin top-left, x = column, y = row.
/// Ordering is raster order: by row first, then column.
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend std::strong_ordering operator<=>(const Pixel& a, const Pixel& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

inline int chebyshev(Pixel a, Pixel b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

inline double squared_distance(Pixel a, Pixel b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// 8-neighbourhood offsets in cyclic order E, NE, N, NW, W, SW, S, SE; 4-neighbours sit at even indices.
inline constexpr int kNeighborDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr int kNeighborDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

/// Dense real-valued grid. Holds confidence fields, heatmaps and cost maps.
///
/// Every value is finite. A field flagged as a probability field additionally has
/// all values in [0, 1]; both invariants are checked at construction and the
/// values are read-only afterwards.
template <typename Scalar>
class ScalarField {
 public:
  using Values = Raster<Scalar>;

  ScalarField() = default;

  ScalarField(int width, int height, Scalar fill = Scalar(0), bool probability = false)
      : ScalarField(Values::Constant(height, width, fill), probability) {}

  explicit ScalarField(Values values, bool probability = false)
      : values_(std::move(values)), probability_(probability) {
    if (!values_.isFinite().all()) throw std::invalid_argument("field contains non-finite values");
    if (probability_ && values_.size() > 0 &&
        (values_.minCoeff() < Scalar(0) || values_.maxCoeff() > Scalar(1)))
      throw std::invalid_argument("probability field has values outside [0,1]");
  }

  int width() const { return static_cast<int>(values_.cols()); }
  int height() const { return static_cast<int>(values_.rows()); }
  bool is_probability() const { return probability_; }
  const Values& values() const { return values_; }

  Scalar operator()(int x, int y) const { return values_(y, x); }
  Scalar operator()(Pixel p) const { return values_(p.y, p.x); }

  bool contains(Pixel p) const { return p.x >= 0 && p.y >= 0 && p.x < width() && p.y < height(); }

  template <typename Other>
  ScalarField<Other> cast() const {
    return ScalarField<Other>(values_.template cast<Other>(), probability_);
  }

  friend bool operator==(const ScalarField& a, const ScalarField& b) {
    return a.probability_ == b.probability_ && a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && (a.values_ == b.values_).all();
  }

 private:
  Values values_;
  bool probability_ = false;
};

using Field = ScalarField<float>;
using FieldD = ScalarField<double>;

template <typename A, typename B>
bool same_dims(const A& a, const B& b) {
  return a.width() == b.width() && a.height() == b.height();
}

/// Boolean grid: skeletons, thresholded fields, ground truth.
class BinaryMask {
 public:
  using Bits = Raster<bool>;

  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false) : bits_(Bits::Constant(height, width, fill)) {}
  explicit BinaryMask(Bits bits) : bits_(std::move(bits)) {}

  int width() const { return static_cast<int>(bits_.cols()); }
  int height() const { return static_cast<int>(bits_.rows()); }
  const Bits& bits() const { return bits_; }

  bool operator()(int x, int y) const { return bits_(y, x); }
  bool operator()(Pixel p) const { return bits_(p.y, p.x); }

  bool contains(Pixel p) const { return p.x >= 0 && p.y >= 0 && p.x < width() && p.y < height(); }
  /// Foreground test that treats out-of-bounds as background.
  bool on(int x, int y) const { return x >= 0 && y >= 0 && x < width() && y < height() && bits_(y, x); }

  std::int64_t count() const { return bits_.count(); }

  /// Foreground pixels in raster order.
  std::vector<Pixel> foreground() const;

  /// Copy with the given pixels set to foreground.
  BinaryMask stamped(std::span<const Pixel> pixels) const;

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.bits_.rows() == b.bits_.rows() && a.bits_.cols() == b.bits_.cols() && (a.bits_ == b.bits_).all();
  }
  friend BinaryMask operator|(const BinaryMask& a, const BinaryMask& b);

 private:
  Bits bits_;
};

enum class PointKind { endpoint, junction, breakpoint, skeleton };

std::string_view to_string(PointKind kind);
/// Throws std::invalid_argument for an unknown name.
PointKind point_kind_from_string(std::string_view name);

struct Point {
  int x = 0;
  int y = 0;
  PointKind kind = PointKind::endpoint;
  double score = 1.0;

  Pixel pixel() const { return {x, y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered points; no two share (x, y, kind).
class PointSet {
 public:
  PointSet() = default;

  /// Throws std::invalid_argument on a duplicate (x, y, kind).
  void add(const Point& p);
  bool contains(int x, int y, PointKind kind) const { return keys_.count(key(x, y, kind)) != 0; }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  const std::vector<Point>& points() const { return points_; }

  PointSet of_kind(PointKind kind) const;

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.points_ == b.points_; }

 private:
  static std::uint64_t key(int x, int y, PointKind kind) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 34) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 2) |
           static_cast<std::uint64_t>(kind);
  }

  std::vector<Point> points_;
  std::unordered_set<std::uint64_t> keys_;
};

/// Non-empty 8-connected simple pixel sequence.
class PixelPath {
 public:
  /// Throws std::invalid_argument if the sequence is empty, has a non-adjacent step or repeats a pixel.
  explicit PixelPath(std::vector<Pixel> pixels);

  const std::vector<Pixel>& pixels() const { return pixels_; }
  std::size_t size() const { return pixels_.size(); }
  Pixel front() const { return pixels_.front(); }
  Pixel back() const { return pixels_.back(); }
  auto begin() const { return pixels_.begin(); }
  auto end() const { return pixels_.end(); }

  friend bool operator==(const PixelPath&, const PixelPath&) = default;

 private:
  std::vector<Pixel> pixels_;
};

}  // namespace skelrepair
