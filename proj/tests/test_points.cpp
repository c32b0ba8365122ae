#include "skelrepair/errors.hpp"
#include "skelrepair/points.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace skelrepair;

namespace {

PointSet single(int x, int y, PointKind kind = PointKind::endpoint) {
  PointSet s;
  s.add({x, y, kind, 1.0});
  return s;
}

}  // namespace

TEST_CASE("PeakConfig validation") {
  CHECK_NOTHROW(PeakConfig{}.validate());
  CHECK_THROWS_AS((PeakConfig{0.0}).validate(), ConfigError);
  CHECK_THROWS_AS((PeakConfig{10.0, 4}).validate(), ConfigError);
  CHECK_THROWS_AS((PeakConfig{10.0, 1}).validate(), ConfigError);
  CHECK_THROWS_AS((PeakConfig{10.0, 5, 1.5}).validate(), ConfigError);
  CHECK_THROWS_AS((PeakConfig{10.0, 5, 0.3, -1.0}).validate(), ConfigError);
}

TEST_CASE("render_heatmap values") {
  const auto hm = render_heatmap(single(20, 30), 64, 64, 10.0);
  CHECK(hm.is_probability());
  CHECK(hm(20, 30) == 1.0f);
  const double oracle = std::exp(-0.5);
  CHECK(hm(30, 30) == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(hm(20, 40) == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(hm(26, 38) == doctest::Approx(oracle).epsilon(1e-6));  // 6-8-10 triangle
  const auto empty = render_heatmap(PointSet{}, 8, 8, 10.0);
  CHECK((empty.values() == 0.0f).all());
  CHECK_THROWS_AS(render_heatmap(single(8, 0), 8, 8, 10.0), std::out_of_range);
}

TEST_CASE("render_heatmap combines points by maximum") {
  PointSet s;
  s.add({10, 10, PointKind::endpoint, 1.0});
  s.add({14, 10, PointKind::endpoint, 1.0});
  const auto hm = render_heatmap<double>(s, 32, 32, 3.0);
  CHECK(hm(10, 10) == 1.0);
  CHECK(hm(14, 10) == 1.0);
  CHECK(hm(12, 10) == doctest::Approx(std::exp(-4.0 / 18.0)));
}

TEST_CASE("detect_peaks on a single Gaussian") {
  const auto hm = render_heatmap(single(20, 30), 64, 64, 10.0);
  const auto peaks = detect_peaks(hm, PeakConfig{}, PointKind::junction);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].pixel() == Pixel{20, 30});
  CHECK(peaks[0].kind == PointKind::junction);
  CHECK(peaks[0].score == 1.0);
}

TEST_CASE("detect_peaks keeps the raster-smaller of two equal blobs") {
  PointSet s;
  s.add({23, 20, PointKind::endpoint, 1.0});
  s.add({20, 20, PointKind::endpoint, 1.0});
  const auto hm = render_heatmap(s, 48, 48, 2.0);
  PeakConfig cfg;
  cfg.nms_radius = 5.0;
  const auto peaks = detect_peaks(hm, cfg, PointKind::endpoint);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].pixel() == Pixel{20, 20});
}

TEST_CASE("detect_peaks on an all-zero heatmap") {
  CHECK(detect_peaks(Field(16, 16, 0.0f, true), PeakConfig{}, PointKind::endpoint).empty());
  CHECK_THROWS_AS(detect_peaks(Field(16, 16, 0.0f, false), PeakConfig{}, PointKind::endpoint), FormatError);
}

TEST_CASE("render then detect recovers well-separated points exactly") {
  std::mt19937_64 rng(17);
  const double sigma = 10.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    PointSet truth;
    while (static_cast<int>(truth.size()) < n) {
      const Point p{static_cast<int>(rng() % 160), static_cast<int>(rng() % 160), PointKind::endpoint, 1.0};
      bool ok = true;
      for (const Point& q : truth) ok = ok && std::sqrt(squared_distance(p.pixel(), q.pixel())) > 3 * sigma;
      if (ok) truth.add(p);
    }
    const auto peaks = detect_peaks(render_heatmap(truth, 160, 160, sigma), PeakConfig{}, PointKind::endpoint);
    REQUIRE(peaks.size() == truth.size());
    for (const Point& q : truth) CHECK(peaks.contains(q.x, q.y, PointKind::endpoint));
  }
}

TEST_CASE("peaks pass the threshold, are separated, and are deterministic") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int trial = 0; trial < 50; ++trial) {
    Field::Values v(24, 24);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
    const Field hm(v, true);
    PeakConfig cfg;
    cfg.window = 3;
    cfg.nms_radius = 1.0 + static_cast<double>(rng() % 6);
    cfg.peak_threshold = 0.5;
    const auto peaks = detect_peaks(hm, cfg, PointKind::endpoint);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      CHECK(peaks[i].score >= cfg.peak_threshold);
      CHECK(peaks[i].score == hm(peaks[i].pixel()));
      for (std::size_t j = i + 1; j < peaks.size(); ++j)
        CHECK(std::sqrt(squared_distance(peaks[i].pixel(), peaks[j].pixel())) > cfg.nms_radius);
    }
    CHECK(detect_peaks(hm, cfg, PointKind::endpoint) == peaks);
  }
}
