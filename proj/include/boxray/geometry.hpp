#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace boxray {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Oriented line {t*dir + offset*normal}, dir = (cos, sin), normal = (sin, -cos).
class Ray {
 public:
  Ray(double theta, double offset);

  /// Line through two distinct points, oriented from `from` to `to`.
  static Ray through(Vec2 from, Vec2 to);

  double theta() const { return theta_; }
  double offset() const { return offset_; }
  Vec2 dir() const { return dir_; }
  Vec2 normal() const { return normal_; }
  Vec2 point_at(double t) const { return t * dir_ + offset_ * normal_; }

 private:
  double theta_;
  double offset_;
  Vec2 dir_;
  Vec2 normal_;
};

Ray ray_from_angle_offset(double theta, double y);

/// Unit-step Cartesian grid of n x n cells; cell (p, q) spans
/// origin + [p, p+1] x [q, q+1].
struct GridSpec {
  int n = 1;
  Vec2 origin{};

  static GridSpec centered(int n);

  Vec2 center() const { return origin + Vec2{0.5 * n, 0.5 * n}; }
  /// Offset of the ray measured in the grid's local frame.
  double local_offset(const Ray& ray) const { return ray.offset() - dot(origin, ray.normal()); }
  void validate() const;
};

enum class Orientation { MainlyVertical, MainlyHorizontal };

Orientation classify(const Ray& ray);

/// Parametric interval of a ray inside the grid square.
struct Chord {
  double t_enter = 0.0;
  double t_exit = 0.0;
  double length() const { return t_exit - t_enter; }
};

/// Tangent and corner-grazing rays count as misses.
std::optional<Chord> clip_to_grid(const Ray& ray, const GridSpec& grid);

/// First intersection with the grid boundary, in world coordinates.
std::optional<Vec2> entry_point(const Ray& ray, const GridSpec& grid);

struct RaySet {
  std::vector<Ray> rays;
  std::string metadata;

  std::size_t size() const { return rays.size(); }
};

struct FanBeamConfig {
  double source_to_detector = 0.0;
  double source_to_object = 0.0;
  double detector_pitch = 0.0;
  int n_detectors = 0;
  std::vector<double> angles;
  double cor_shift = 0.0;

  void validate() const;
  /// Grid units per world unit: the magnified detector spans the grid width.
  double grid_scale(const GridSpec& grid) const;
};

/// Angle-major, offset-minor; angles uniform on [0, pi), offsets centered on
/// the grid center and uniform across the grid width.
RaySet parallel_rayset(int n_angles, int n_offsets, const GridSpec& grid);

/// Flat-detector fan beam rotating about the grid center.
RaySet fanbeam_rayset(const FanBeamConfig& config, const GridSpec& grid);

}  // namespace boxray
