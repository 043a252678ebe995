#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "boxray/error.hpp"
#include "boxray/geometry.hpp"

using namespace boxray;
using std::numbers::pi;

TEST_CASE("ray vectors from angle and offset") {
  const Ray a = ray_from_angle_offset(0.0, 0.5);
  CHECK(a.dir().x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.dir().y == doctest::Approx(0.0));
  CHECK(a.normal().x == doctest::Approx(0.0));
  CHECK(a.normal().y == doctest::Approx(-1.0));
  CHECK(a.offset() == 0.5);

  const Ray b = ray_from_angle_offset(pi / 2, 0.0);
  CHECK(std::abs(b.dir().x) < 1e-15);
  CHECK(b.dir().y == doctest::Approx(1.0));
  CHECK(b.normal().x == doctest::Approx(1.0));
  CHECK(std::abs(b.normal().y) < 1e-15);

  const Ray c = ray_from_angle_offset(pi / 4, 1.0);
  const double h = std::sqrt(2.0) / 2;
  CHECK(c.dir().x == doctest::Approx(h));
  CHECK(c.dir().y == doctest::Approx(h));
  CHECK(c.normal().x == doctest::Approx(h));
  CHECK(c.normal().y == doctest::Approx(-h));

  CHECK_THROWS_AS(ray_from_angle_offset(std::nan(""), 0.0), InvalidArgument);
  CHECK_THROWS_AS(ray_from_angle_offset(0.0, INFINITY), InvalidArgument);
}

TEST_CASE("ray invariants hold for random rays") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const Ray r(u(rng), u(rng));
    CHECK(std::abs(dot(r.dir(), r.normal())) <= 1e-12);
    CHECK(std::abs(norm(r.dir()) - 1.0) <= 1e-12);
    CHECK(std::abs(norm(r.normal()) - 1.0) <= 1e-12);
    const double t = u(rng);
    CHECK(std::abs(dot(r.point_at(t), r.normal()) - r.offset()) <= 1e-9);
  }
}

TEST_CASE("Ray::through keeps orientation and both points") {
  const Vec2 a{1.0, 2.0}, b{-3.0, 5.5};
  const Ray r = Ray::through(a, b);
  CHECK(std::abs(dot(a, r.normal()) - r.offset()) < 1e-12);
  CHECK(std::abs(dot(b, r.normal()) - r.offset()) < 1e-12);
  CHECK(dot(b - a, r.dir()) > 0.0);
  CHECK_THROWS_AS(Ray::through(a, a), InvalidArgument);
}

TEST_CASE("classify") {
  CHECK(classify(Ray(pi / 2, 0)) == Orientation::MainlyVertical);
  CHECK(classify(Ray(0, 0)) == Orientation::MainlyHorizontal);
  CHECK(classify(Ray(pi / 4, 0)) == Orientation::MainlyHorizontal);
  CHECK(classify(Ray(3 * pi / 4, 0)) == Orientation::MainlyHorizontal);
  CHECK(classify(Ray(pi / 4 + 1e-9, 0)) == Orientation::MainlyVertical);
  // Partition: exactly one tag, matching the |sin| > 1/sqrt2 rule.
  for (int i = 0; i < 720; ++i) {
    const double th = -2 * pi + i * pi / 180;
    if (std::abs(std::abs(std::sin(th)) - std::abs(std::cos(th))) < 1e-12) {
      CHECK(classify(Ray(th, 0)) == Orientation::MainlyHorizontal);
      continue;
    }
    const bool vertical = std::abs(std::sin(th)) > std::abs(std::cos(th));
    CHECK((classify(Ray(th, 0)) == Orientation::MainlyVertical) == vertical);
  }
}

TEST_CASE("entry point examples") {
  const GridSpec g{4, {0, 0}};
  const auto e = entry_point(Ray(pi / 2, 2.5), g);
  REQUIRE(e.has_value());
  CHECK(e->x == doctest::Approx(2.5));
  CHECK(std::abs(e->y) < 1e-12);

  CHECK_FALSE(entry_point(Ray(0.3, 100.0), g).has_value());

  const auto corner = entry_point(Ray(pi / 4, 0.0), g);
  REQUIRE(corner.has_value());
  CHECK(std::abs(corner->x) < 1e-12);
  CHECK(std::abs(corner->y) < 1e-12);
}

TEST_CASE("tangent rays are misses") {
  const GridSpec g{4, {0, 0}};
  // Horizontal line y = 0 and vertical line x = 4 run along faces.
  CHECK_FALSE(clip_to_grid(Ray(0.0, 0.0), g).has_value());
  CHECK_FALSE(clip_to_grid(Ray(pi / 2, 4.0), g).has_value());
  // Touching a single corner.
  CHECK_FALSE(clip_to_grid(Ray(3 * pi / 4, 0.0), g).has_value());
}

TEST_CASE("entry points lie on the boundary and precede the chord") {
  const GridSpec g{7, {-3.5, -3.5}};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> th(0, 2 * pi), off(-6, 6);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Ray r(th(rng), off(rng));
    const auto e = entry_point(r, g);
    const auto chord = clip_to_grid(r, g);
    CHECK(e.has_value() == chord.has_value());
    if (!e) continue;
    ++hits;
    const double dx = std::min(std::abs(e->x - g.origin.x), std::abs(e->x - g.origin.x - g.n));
    const double dy = std::min(std::abs(e->y - g.origin.y), std::abs(e->y - g.origin.y - g.n));
    CHECK(std::min(dx, dy) <= 1e-9);
    const Vec2 p = r.point_at(chord->t_enter);
    CHECK(norm(p - *e) <= 1e-9);
  }
  CHECK(hits > 500);
}

TEST_CASE("parallel ray set") {
  const GridSpec g{4, {0, 0}};
  const RaySet one = parallel_rayset(1, 1, g);
  REQUIRE(one.size() == 1);
  CHECK(one.rays[0].theta() == 0.0);
  CHECK(std::abs(dot(g.center(), one.rays[0].normal()) - one.rays[0].offset()) < 1e-12);

  const RaySet two = parallel_rayset(2, 1, g);
  REQUIRE(two.size() == 2);
  CHECK(two.rays[0].theta() == 0.0);
  CHECK(two.rays[1].theta() == doctest::Approx(pi / 2));

  const RaySet s = parallel_rayset(8, 4, GridSpec::centered(4));
  REQUIRE(s.size() == 32);
  for (int a = 0; a < 8; ++a) {
    for (int j = 0; j < 4; ++j) {
      const Ray& r = s.rays[a * 4 + j];
      CHECK(r.theta() == doctest::Approx(pi * a / 8));
      CHECK(r.offset() == doctest::Approx(j + 0.5 - 2.0));
    }
  }
  CHECK_THROWS_AS(parallel_rayset(0, 4, g), InvalidArgument);
  CHECK_THROWS_AS(parallel_rayset(4, 0, g), InvalidArgument);

  // (2N, N) covers pi N / 2 angles.
  const int n = 32;
  CHECK(2 * n >= std::ceil(pi * n / 2));
}

TEST_CASE("parallel ray set ordering is a layout choice only") {
  const GridSpec g = GridSpec::centered(6);
  const RaySet s = parallel_rayset(5, 3, g);
  std::vector<std::pair<double, double>> angle_major, offset_major;
  for (const Ray& r : s.rays) angle_major.emplace_back(r.theta(), r.offset());
  for (int j = 0; j < 3; ++j) {
    for (int a = 0; a < 5; ++a) {
      const Ray& r = s.rays[a * 3 + j];
      offset_major.emplace_back(r.theta(), r.offset());
    }
  }
  std::sort(angle_major.begin(), angle_major.end());
  std::sort(offset_major.begin(), offset_major.end());
  CHECK(angle_major == offset_major);
}

namespace {
FanBeamConfig small_fan(double cor) {
  FanBeamConfig f;
  f.source_to_detector = 100.0;
  f.source_to_object = 40.0;
  f.detector_pitch = 0.5;
  f.n_detectors = 33;
  f.angles = {0.0, 0.7, 2.0};
  f.cor_shift = cor;
  return f;
}
}  // namespace

TEST_CASE("fan beam central ray passes through the grid centre") {
  const GridSpec g = GridSpec::centered(16);
  const RaySet s = fanbeam_rayset(small_fan(0.0), g);
  REQUIRE(s.size() == 3 * 33);
  for (int a = 0; a < 3; ++a) {
    const Ray& central = s.rays[a * 33 + 16];
    CHECK(std::abs(central.offset()) < 1e-12);
    CHECK(std::abs(dot(g.center(), central.normal()) - central.offset()) < 1e-12);
  }
}

TEST_CASE("fan beam COR shift moves the central ray by the shift in grid units") {
  const GridSpec g = GridSpec::centered(16);
  const FanBeamConfig f = small_fan(0.8);
  const double scale = f.grid_scale(g);
  const RaySet s = fanbeam_rayset(f, g);
  for (int a = 0; a < 3; ++a) {
    CHECK(s.rays[a * 33 + 16].offset() == doctest::Approx(0.8 * scale).epsilon(1e-12));
  }
}

TEST_CASE("fan beam rays meet at the source") {
  const GridSpec g = GridSpec::centered(16);
  const FanBeamConfig f = small_fan(0.3);
  const RaySet s = fanbeam_rayset(f, g);
  const double scale = f.grid_scale(g);
  for (int a = 0; a < 3; ++a) {
    const double beta = f.angles[a];
    const Vec2 src = g.center() + scale * (f.source_to_object * Vec2{std::cos(beta), std::sin(beta)} +
                                           f.cor_shift * Vec2{-std::sin(beta), std::cos(beta)});
    for (int j = 0; j < f.n_detectors; ++j) {
      const Ray& r = s.rays[a * f.n_detectors + j];
      CHECK(std::abs(dot(src, r.normal()) - r.offset()) < 1e-9);
    }
  }
}

TEST_CASE("fan beam scanner-sized configuration") {
  FanBeamConfig f;
  f.source_to_detector = 765.7;
  f.source_to_object = 96.46;
  f.detector_pitch = 0.127;
  f.n_detectors = 512;
  for (int a = 0; a < 800; ++a) f.angles.push_back(2 * pi * a / 800);
  const GridSpec g = GridSpec::centered(128);
  const RaySet s = fanbeam_rayset(f, g);
  CHECK(s.size() == 800u * 512u);
  // The magnified detector spans the grid width.
  const Ray& first = s.rays[0];
  const Ray& last = s.rays[511];
  const Vec2 src = g.center() + f.grid_scale(g) * f.source_to_object * Vec2{1, 0};
  const double spread = std::abs(first.offset() - last.offset());
  CHECK(spread > 0.0);
  CHECK(std::abs(dot(src, first.normal()) - first.offset()) < 1e-9);
}

TEST_CASE("fan beam config validation") {
  FanBeamConfig f = small_fan(0.0);
  const GridSpec g = GridSpec::centered(8);
  f.source_to_detector = 30.0;
  CHECK_THROWS_AS(fanbeam_rayset(f, g), InvalidArgument);
  f = small_fan(0.0);
  f.detector_pitch = 0.0;
  CHECK_THROWS_AS(fanbeam_rayset(f, g), InvalidArgument);
  f = small_fan(0.0);
  f.angles.clear();
  CHECK_THROWS_AS(fanbeam_rayset(f, g), InvalidArgument);
  CHECK_THROWS_AS((GridSpec{0, {}}.validate()), InvalidArgument);
}
