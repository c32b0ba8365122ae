#include "skelrepair/errors.hpp"
#include "skelrepair/skeletonize.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace skelrepair;
using testing::mask_from_rows;

TEST_CASE("threshold is strict and validates tau") {
  Field::Values v(1, 2);
  v << 0.4f, 0.6f;
  const Field f(v, true);
  const BinaryMask m = threshold(f, 0.5);
  CHECK_FALSE(m(0, 0));
  CHECK(m(1, 0));
  CHECK(threshold(Field(3, 3, 0.01f, true), 0.0).count() == 9);
  CHECK(threshold(Field(3, 3, 1.0f, true), 1.0).count() == 0);
  CHECK_THROWS_AS(threshold(f, 1.2), ConfigError);
  CHECK_THROWS_AS(threshold(f, -0.1), ConfigError);
  CHECK_THROWS_AS(threshold(Field(v, false), 0.5), FormatError);
}

TEST_CASE("threshold is monotone in tau") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Field::Values v(8, 9);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
    const Field f(v, true);
    double a = t(rng), b = t(rng);
    if (a > b) std::swap(a, b);
    CHECK(testing::subset_of(threshold(f, b), threshold(f, a)));
  }
}

TEST_CASE("thin keeps a one-pixel line and the empty mask") {
  const auto line = mask_from_rows({".........", ".#######.", "........."});
  CHECK(thin(line) == line);
  const BinaryMask empty(6, 4);
  CHECK(thin(empty) == empty);
}

TEST_CASE("thin reduces a 3x7 bar to one thin curve") {
  const auto bar = mask_from_rows({".........", ".#######.", ".#######.", ".#######.", "........."});
  const BinaryMask t = thin(bar);
  CHECK(t.count() > 0);
  CHECK(testing::subset_of(t, bar));
  CHECK(testing::count_components_bfs(t) == 1);
  CHECK_FALSE(testing::has_solid_2x2(t));
  for (const Pixel& p : t.foreground()) CHECK(testing::brute_degree(t, p.x, p.y) <= 2);
}

TEST_CASE("thin leaves no 2x2 block on thick bars and discs") {
  for (int thickness = 2; thickness <= 9; ++thickness) {
    BinaryMask::Bits bits = BinaryMask::Bits::Constant(thickness + 4, 40, false);
    bits.block(2, 2, thickness, 36).setConstant(true);
    const BinaryMask t = thin(BinaryMask(bits));
    CHECK(testing::count_components_bfs(t) == 1);
    CHECK_FALSE(testing::has_solid_2x2(t));
  }
  for (int radius = 2; radius <= 12; ++radius) {
    const int n = 2 * radius + 5;
    BinaryMask::Bits bits = BinaryMask::Bits::Constant(n, n, false);
    const int c = n / 2;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) bits(y, x) = (x - c) * (x - c) + (y - c) * (y - c) <= radius * radius;
    const BinaryMask t = thin(BinaryMask(bits));
    CHECK(testing::count_components_bfs(t) == 1);
    CHECK_FALSE(testing::has_solid_2x2(t));
  }
}

TEST_CASE("thin preserves components and is idempotent on random masks") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = 4 + static_cast<int>(rng() % 13), h = 4 + static_cast<int>(rng() % 13);
    const double density = 0.2 + 0.6 * static_cast<double>(rng() % 1000) / 1000.0;
    const BinaryMask m = testing::random_mask(rng, w, h, density);
    const BinaryMask t = thin(m);
    REQUIRE(testing::subset_of(t, m));
    REQUIRE(testing::count_components_bfs(t) == testing::count_components_bfs(m));
    REQUIRE(thin(t) == t);
  }
}

TEST_CASE("degree_map counts 8-neighbours on foreground only") {
  const auto line = mask_from_rows({".......", ".#####.", "......."});
  const DegreeMap d = degree_map(line);
  const int expected[] = {1, 2, 2, 2, 1};
  for (int i = 0; i < 5; ++i) CHECK(d(1 + i, 1) == expected[i]);
  CHECK_FALSE(d(0, 0).has_value());

  const auto plus = mask_from_rows({".....", "..#..", ".###.", "..#..", "....."});
  const DegreeMap p = degree_map(plus);
  CHECK(p(2, 2) == 4);
  CHECK(p(2, 1) == 3);  // arm tips touch their diagonal neighbours too
  const auto isolated = mask_from_rows({"...", ".#.", "..."});
  CHECK(degree_map(isolated)(1, 1) == 0);
}

TEST_CASE("degree_map agrees with a brute-force count") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryMask m = testing::random_mask(rng, 9, 7, 0.5);
    const DegreeMap d = degree_map(m);
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 9; ++x) {
        if (m(x, y))
          CHECK(d(x, y) == testing::brute_degree(m, x, y));
        else
          CHECK_FALSE(d(x, y).has_value());
        CHECK(neighbor_count(m, x, y) == testing::brute_degree(m, x, y));
      }
  }
}

TEST_CASE("structural points of a plus, a line and a Y") {
  // A plus with arms of length 3 so the tips have a single neighbour.
  const auto plus = mask_from_rows({
      ".......",
      "...#...",
      "...#...",
      ".#####.",
      "...#...",
      "...#...",
      ".......",
  });
  const auto plus_pts = extract_structural_points(thin(plus));
  CHECK(plus_pts.of_kind(PointKind::breakpoint).size() == 4);
  // Every pixel of the central cross has degree >= 3.
  const auto plus_j = plus_pts.of_kind(PointKind::junction);
  CHECK_FALSE(plus_j.empty());
  for (const Point& p : plus_j) CHECK(chebyshev(p.pixel(), Pixel{3, 3}) <= 1);

  const auto line = mask_from_rows({"........", ".######.", "........"});
  const auto line_pts = extract_structural_points(line);
  CHECK(line_pts.of_kind(PointKind::breakpoint).size() == 2);
  CHECK(line_pts.of_kind(PointKind::junction).empty());

  // Three 4-pixel arms meeting at one pixel (two diagonal, one vertical).
  const auto y = mask_from_rows({
      ".........",
      ".#.....#.",
      "..#...#..",
      "...#.#...",
      "....#....",
      "....#....",
      "....#....",
      "....#....",
      ".........",
  });
  const auto y_pts = extract_structural_points(y);
  REQUIRE(y_pts.of_kind(PointKind::junction).size() == 1);
  CHECK(y_pts.of_kind(PointKind::junction)[0].pixel() == Pixel{4, 4});
  CHECK(y_pts.of_kind(PointKind::breakpoint).size() == 3);
  for (const Point& p : y_pts) CHECK(p.score == 1.0);
}

TEST_CASE("an orthogonal T keeps three tips after thinning") {
  const auto t = mask_from_rows({
      ".........",
      ".#######.",
      "....#....",
      "....#....",
      "....#....",
      "....#....",
      ".........",
  });
  const auto pts = extract_structural_points(thin(t));
  CHECK(pts.of_kind(PointKind::breakpoint).size() == 3);
  CHECK(pts.of_kind(PointKind::junction).size() >= 1);
}

TEST_CASE("structural points satisfy their degree predicate on thinned random masks") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMask t = thin(testing::random_mask(rng, 12, 12, 0.45));
    const PointSet pts = extract_structural_points(t);
    std::size_t expected = 0;
    for (const Pixel& p : t.foreground()) {
      const int d = testing::brute_degree(t, p.x, p.y);
      expected += (d <= 1 || d >= 3) ? 1 : 0;
    }
    CHECK(pts.size() == expected);
    for (const Point& p : pts) {
      REQUIRE(t(p.x, p.y));
      const int d = testing::brute_degree(t, p.x, p.y);
      if (p.kind == PointKind::breakpoint)
        CHECK(d <= 1);
      else
        CHECK((p.kind == PointKind::junction && d >= 3));
    }
  }
}

TEST_CASE("components under 8-connectivity") {
  CHECK(components(mask_from_rows({"#####", ".....", "#####"})).count() == 2);
  CHECK(components(BinaryMask(5, 5)).count() == 0);
  const auto diag = mask_from_rows({"#.", ".#"});
  const auto labels = components(diag);
  CHECK(labels.count() == 1);
  CHECK(labels(0, 0) == labels(1, 1));
  CHECK(labels(1, 0) == 0);
}

TEST_CASE("component labels are dense, in raster order, and match reachability") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const BinaryMask m = testing::random_mask(rng, 11, 9, 0.35);
    const auto labels = components(m);
    CHECK(labels.count() == testing::count_components_bfs(m));
    int next = 1;
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 11; ++x) {
        const int l = labels(x, y);
        CHECK((l == 0) == !m(x, y));
        if (l == next) ++next;
        CHECK(l < next);
        // 8-neighbours on the foreground share the label.
        for (int k = 0; k < 8; ++k) {
          const int nx = x + kNeighborDx[k], ny = y + kNeighborDy[k];
          if (m(x, y) && m.on(nx, ny)) CHECK(labels(nx, ny) == l);
        }
      }
    CHECK(next - 1 == labels.count());
  }
}
