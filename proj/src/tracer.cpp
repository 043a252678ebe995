#include "boxray/tracer.hpp"

#include "boxray/error.hpp"

namespace boxray {

std::vector<TraversalStep> trace_cells(const Ray& ray, const GridSpec& grid) {
  std::vector<TraversalStep> steps;
  visit_cells(ray, grid, [&](const TraversalStep& s) { steps.push_back(s); });
  return steps;
}

double basis_contribution(const CoefficientGrid& coeffs, Vec2 x_k, const Ray& ray, CellIndex cell,
                          const AngleKernel& kernel) {
  if (!coeffs.contains(cell.p, cell.q)) return 0.0;
  const double c = coeffs.at(cell.p, cell.q);
  if (c == 0.0) return 0.0;
  const Vec2 o = coeffs.grid.origin + Vec2{cell.p + 0.5, cell.q + 0.5};
  const double yk = dot(o - x_k, ray.normal());
  return c * kernel(yk);
}

double basis_contribution(const CoefficientGrid& coeffs, Vec2 x_k, double theta, CellIndex cell,
                          const Generator& gen) {
  const Ray ray(theta, 0.0);
  return basis_contribution(coeffs, x_k, ray, cell, AngleKernel(gen, theta));
}

double forward_ray(const CoefficientGrid& coeffs, const Ray& ray, const Generator& gen) {
  const AngleKernel kernel(gen, ray.theta());
  double acc = 0.0;
  for_each_weight(coeffs.grid, ray, kernel, tracer_neighbor_count(gen),
                  [&](std::size_t idx, double w) { acc += coeffs.data[idx] * w; });
  return acc;
}

void backproject_ray(CoefficientGrid& accumulator, const Ray& ray, double value, const Generator& gen) {
  if (value == 0.0) return;
  const AngleKernel kernel(gen, ray.theta());
  for_each_weight(accumulator.grid, ray, kernel, tracer_neighbor_count(gen),
                  [&](std::size_t idx, double w) { accumulator.data[idx] += value * w; });
}

}  // namespace boxray
