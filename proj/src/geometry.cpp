#include "boxray/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "boxray/error.hpp"

namespace boxray {

Ray::Ray(double theta, double offset) : theta_(theta), offset_(offset) {
  if (!std::isfinite(theta) || !std::isfinite(offset)) {
    throw InvalidArgument("ray angle and offset must be finite");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  dir_ = {c, s};
  normal_ = {s, -c};
}

Ray Ray::through(Vec2 from, Vec2 to) {
  const Vec2 d = to - from;
  if (!(norm(d) > 0.0)) throw InvalidArgument("ray endpoints must be distinct");
  const double theta = std::atan2(d.y, d.x);
  const Vec2 normal{std::sin(theta), -std::cos(theta)};
  return Ray(theta, dot(from, normal));
}

Ray ray_from_angle_offset(double theta, double y) { return Ray(theta, y); }

GridSpec GridSpec::centered(int n) { return GridSpec{n, Vec2{-0.5 * n, -0.5 * n}}; }

void GridSpec::validate() const {
  if (n < 1) throw InvalidArgument("grid size must be positive");
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    throw InvalidArgument("grid origin must be finite");
  }
}

Orientation classify(const Ray& ray) {
  // |sin| > |cos| is |sin| > 1/sqrt(2) without the rounding of 1/sqrt(2).
  // Diagonals that differ only by rounding of sin/cos stay horizontal.
  const double s = std::abs(ray.dir().y), c = std::abs(ray.dir().x);
  return s > c + 1e-12 ? Orientation::MainlyVertical : Orientation::MainlyHorizontal;
}

namespace {

constexpr double kParallelTol = 1e-14;
constexpr double kMinChord = 1e-9;

// Slab test along one axis. Returns false when the ray runs parallel to the
// slab and does not lie strictly inside it.
bool clip_axis(double p0, double d, double hi, double& t_lo, double& t_hi) {
  if (std::abs(d) < kParallelTol) {
    return p0 > 0.0 && p0 < hi;
  }
  double a = (0.0 - p0) / d;
  double b = (hi - p0) / d;
  if (a > b) std::swap(a, b);
  t_lo = std::max(t_lo, a);
  t_hi = std::min(t_hi, b);
  return true;
}

}  // namespace

std::optional<Chord> clip_to_grid(const Ray& ray, const GridSpec& grid) {
  const Vec2 p0 = ray.offset() * ray.normal() - grid.origin;
  const Vec2 d = ray.dir();
  const double n = grid.n;
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  if (!clip_axis(p0.x, d.x, n, t_lo, t_hi)) return std::nullopt;
  if (!clip_axis(p0.y, d.y, n, t_lo, t_hi)) return std::nullopt;
  if (!(t_hi - t_lo > kMinChord)) return std::nullopt;
  return Chord{t_lo, t_hi};
}

std::optional<Vec2> entry_point(const Ray& ray, const GridSpec& grid) {
  const auto chord = clip_to_grid(ray, grid);
  if (!chord) return std::nullopt;
  Vec2 local = ray.point_at(chord->t_enter) - grid.origin;
  const double n = grid.n;
  const double snap = 1e-9 * std::max(1.0, n);
  for (double* c : {&local.x, &local.y}) {
    if (std::abs(*c) < snap) *c = 0.0;
    if (std::abs(*c - n) < snap) *c = n;
  }
  return local + grid.origin;
}

void FanBeamConfig::validate() const {
  if (!(source_to_object > 0.0) || !(source_to_detector > source_to_object)) {
    throw InvalidArgument("fan beam requires source_to_detector > source_to_object > 0");
  }
  if (!(detector_pitch > 0.0)) throw InvalidArgument("detector pitch must be positive");
  if (n_detectors < 1) throw InvalidArgument("fan beam needs at least one detector");
  if (angles.empty()) throw InvalidArgument("fan beam needs at least one angle");
  if (!std::isfinite(cor_shift)) throw InvalidArgument("cor_shift must be finite");
}

double FanBeamConfig::grid_scale(const GridSpec& grid) const {
  const double fov = n_detectors * detector_pitch * source_to_object / source_to_detector;
  return grid.n / fov;
}

RaySet parallel_rayset(int n_angles, int n_offsets, const GridSpec& grid) {
  if (n_angles < 1 || n_offsets < 1) {
    throw InvalidArgument("parallel geometry needs at least one angle and one offset");
  }
  grid.validate();
  RaySet set;
  set.rays.reserve(static_cast<std::size_t>(n_angles) * n_offsets);
  const Vec2 center = grid.center();
  const double spacing = static_cast<double>(grid.n) / n_offsets;
  for (int a = 0; a < n_angles; ++a) {
    const double theta = std::numbers::pi * a / n_angles;
    const Vec2 normal{std::sin(theta), -std::cos(theta)};
    const double base = dot(center, normal);
    for (int j = 0; j < n_offsets; ++j) {
      const double u = (j + 0.5 - 0.5 * n_offsets) * spacing;
      set.rays.emplace_back(theta, base + u);
    }
  }
  std::ostringstream meta;
  meta << "parallel angles=" << n_angles << " offsets=" << n_offsets << " n=" << grid.n;
  set.metadata = meta.str();
  return set;
}

RaySet fanbeam_rayset(const FanBeamConfig& config, const GridSpec& grid) {
  config.validate();
  grid.validate();
  const double scale = config.grid_scale(grid);
  const Vec2 center = grid.center();
  auto to_grid = [&](Vec2 world) { return center + scale * world; };

  RaySet set;
  set.rays.reserve(config.angles.size() * static_cast<std::size_t>(config.n_detectors));
  for (double beta : config.angles) {
    const Vec2 axis{std::cos(beta), std::sin(beta)};     // rotation center -> source
    const Vec2 lateral{-std::sin(beta), std::cos(beta)};  // along the detector
    const Vec2 source = config.source_to_object * axis + config.cor_shift * lateral;
    const Vec2 detector_center = source - config.source_to_detector * axis;
    for (int j = 0; j < config.n_detectors; ++j) {
      const double u = (j - 0.5 * (config.n_detectors - 1)) * config.detector_pitch;
      set.rays.push_back(Ray::through(to_grid(source), to_grid(detector_center + u * lateral)));
    }
  }
  std::ostringstream meta;
  meta << "fanbeam angles=" << config.angles.size() << " detectors=" << config.n_detectors
       << " sdd=" << config.source_to_detector << " sod=" << config.source_to_object
       << " pitch=" << config.detector_pitch << " cor=" << config.cor_shift << " n=" << grid.n;
  set.metadata = meta.str();
  return set;
}

}  // namespace boxray
