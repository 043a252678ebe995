#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "boxray/geometry.hpp"
#include "boxray/image.hpp"
#include "boxray/profiles.hpp"

namespace oracle {

using boxray::CoefficientGrid;
using boxray::Generator;
using boxray::GridSpec;
using boxray::Ray;
using boxray::RaySet;
using boxray::Vec2;

/// Projected profile by numerical convolution of the rect factors: exact
/// antiderivative of the narrowest rect, then trapezoid antiderivatives on a
/// uniform mesh of step h for each further factor.
double convolution_profile(const Generator& gen, double theta, double y, double h = 1e-4);

/// Line integral of eval_generator_2d along the ray with 5-point
/// Gauss-Legendre on every segment between crossings of x, y, x+y, x-y in Z/2.
double line_integral_2d(const Generator& gen, const Ray& ray);

/// Classic Siddon: merged and sorted plane-crossing parameters, cell from the
/// segment midpoint, weight = segment length.
double siddon(const CoefficientGrid& coeffs, const Ray& ray);
/// Per-cell intersection lengths from the same Siddon pass.
std::vector<double> siddon_lengths(const GridSpec& grid, const Ray& ray);

/// Sum over every coefficient of c_k phi_theta(y - <k, theta_perp>).
double exhaustive_forward(const CoefficientGrid& coeffs, const Ray& ray, const Generator& gen);

/// Explicit H (rows = rays, cols = grid cells) from the entry formula.
std::vector<std::vector<double>> dense_matrix(const GridSpec& grid, const RaySet& rays, const Generator& gen);

/// How often for_each_weight reports each index for one ray.
std::vector<int> visit_counts(const GridSpec& grid, const Ray& ray, const Generator& gen);

/// Uniform angle in [0, 2 pi), offset within the grid's circumscribed disk
/// plus `margin`.
RaySet random_rays(const GridSpec& grid, int count, std::uint64_t seed, double margin = 2.0);

std::vector<double> random_vector(std::size_t n, std::uint64_t seed);

}  // namespace oracle
