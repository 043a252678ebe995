#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <vector>

#include "boxray/geometry.hpp"
#include "boxray/image.hpp"
#include "boxray/profiles.hpp"

namespace boxray {

struct CellIndex {
  int p = 0;
  int q = 0;
  friend constexpr bool operator==(CellIndex, CellIndex) = default;
};

struct TraversalStep {
  Vec2 x_enter;  ///< world coordinates
  Vec2 x_exit;
  CellIndex cell;

  double length() const { return norm(x_exit - x_enter); }
};

/// Incremental grid traversal. Calls visit(const TraversalStep&) for every
/// cell whose interior the ray crosses, in traversal order. The cell of a
/// step is floor of the local midpoint.
template <class Visit>
void visit_cells(const Ray& ray, const GridSpec& grid, Visit&& visit) {
  const auto chord = clip_to_grid(ray, grid);
  if (!chord) return;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kMinStep = 1e-12;
  const Vec2 p0 = ray.offset() * ray.normal() - grid.origin;
  const Vec2 d = ray.dir();
  double t = chord->t_enter;
  const double t_end = chord->t_exit;

  struct Axis {
    double p0, d, t_next = kInf;
    long line = 0;
    int step = 0;
    void init(double t0) {
      if (std::abs(d) < 1e-14) return;
      const double c = p0 + t0 * d;
      step = d > 0.0 ? 1 : -1;
      line = d > 0.0 ? static_cast<long>(std::floor(c)) + 1 : static_cast<long>(std::ceil(c)) - 1;
      t_next = (static_cast<double>(line) - p0) / d;
    }
    void advance() {
      line += step;
      t_next = (static_cast<double>(line) - p0) / d;
    }
  };
  Axis ax{p0.x, d.x};
  Axis ay{p0.y, d.y};
  ax.init(t);
  ay.init(t);

  const int last = grid.n - 1;
  while (t < t_end - kMinStep) {
    const double tn = std::min({ax.t_next, ay.t_next, t_end});
    if (tn - t > kMinStep) {
      const double tm = 0.5 * (t + tn);
      const Vec2 mid = p0 + tm * d;
      TraversalStep s;
      s.x_enter = ray.point_at(t);
      s.x_exit = ray.point_at(tn);
      s.cell.p = std::clamp(static_cast<int>(std::floor(mid.x)), 0, last);
      s.cell.q = std::clamp(static_cast<int>(std::floor(mid.y)), 0, last);
      visit(static_cast<const TraversalStep&>(s));
    }
    if (ax.t_next <= tn) ax.advance();
    if (ay.t_next <= tn) ay.advance();
    t = tn;
  }
}

std::vector<TraversalStep> trace_cells(const Ray& ray, const GridSpec& grid);

/// Enumerates every basis index whose support can meet the ray, exactly
/// once, with weight phi_theta(y_k). The traversal runs on the grid padded
/// by K cells; each row (column, for mainly horizontal rays) evaluates the
/// index range [min crossed - K, max crossed + K] clipped to the grid.
/// visit(std::size_t index, double weight).
template <class Visit>
void for_each_weight(const GridSpec& grid, const Ray& ray, const AngleKernel& kernel, int neighbors,
                     Visit&& visit) {
  const int n = grid.n;
  const int k = neighbors;
  const GridSpec padded{n + 2 * k, grid.origin - Vec2{double(k), double(k)}};
  const bool vertical = classify(ray) == Orientation::MainlyVertical;
  const Vec2 nrm = ray.normal();
  const double y_local = grid.local_offset(ray);

  int line = INT_MIN;
  int lo = 0, hi = 0;
  auto flush = [&] {
    if (line < 0 || line >= n) return;
    const int first = std::max(lo - k, 0);
    const int end = std::min(hi + k, n - 1);
    const double line_center = line + 0.5;
    for (int i = first; i <= end; ++i) {
      const double along = i + 0.5;
      // y_k = <o - x_k, theta_perp>; any ray point gives the same value.
      const double yk = vertical ? along * nrm.x + line_center * nrm.y - y_local
                                 : line_center * nrm.x + along * nrm.y - y_local;
      const std::size_t idx = vertical ? static_cast<std::size_t>(line) * n + i
                                       : static_cast<std::size_t>(i) * n + line;
      visit(idx, kernel(yk));
    }
  };

  visit_cells(ray, padded, [&](const TraversalStep& s) {
    const int p = s.cell.p - k;
    const int q = s.cell.q - k;
    const int key = vertical ? q : p;
    const int pos = vertical ? p : q;
    if (key != line) {
      flush();
      line = key;
      lo = hi = pos;
    } else {
      lo = std::min(lo, pos);
      hi = std::max(hi, pos);
    }
  });
  flush();
}

/// c[p, q] * phi_theta(<o - x_k, theta_perp>), o the cell center.
/// Cells outside the grid contribute 0.
double basis_contribution(const CoefficientGrid& coeffs, Vec2 x_k, double theta, CellIndex cell,
                          const Generator& gen);
double basis_contribution(const CoefficientGrid& coeffs, Vec2 x_k, const Ray& ray, CellIndex cell,
                          const AngleKernel& kernel);

/// Line integral of sum_k c_k phi(. - k) along the ray.
double forward_ray(const CoefficientGrid& coeffs, const Ray& ray, const Generator& gen);

/// Adds value * phi_theta(y_k) into every coefficient forward_ray reads,
/// with the same weights.
void backproject_ray(CoefficientGrid& accumulator, const Ray& ray, double value, const Generator& gen);

}  // namespace boxray
