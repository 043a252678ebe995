#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "boxray/geometry.hpp"
#include "boxray/image.hpp"
#include "boxray/profiles.hpp"
#include "boxray/xray_ops.hpp"

namespace boxray {

struct SolverConfig {
  int iterations = 30;
  double lambda = 0.0;  ///< weight of the optional ||c||^2 penalty
  double tol = 0.0;     ///< stop once ||H^T r - lambda c|| <= max(tol, 1e-14) * its initial value
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-iteration norms; entry 0 is the initial state.
struct SolverTrace {
  std::vector<double> residual;         ///< ||p - H c_i||
  std::vector<double> normal_residual;  ///< ||H^T (p - H c_i) - lambda c_i||
  int iterations = 0;
};

/// CGLS: conjugate gradients on (H^T H + lambda I) c = H^T p from c = 0.
std::vector<double> cg_solve(const LinearOperator& op, const std::vector<double>& p, const SolverConfig& cfg,
                             SolverTrace* trace = nullptr);

CoefficientGrid cg_solve(const RaySet& rayset, const Generator& gen, const Sinogram& sino, const GridSpec& grid,
                         const SolverConfig& cfg, SolverTrace* trace = nullptr);

/// Evaluates sum_k c_k phi(x - k) at factor x factor sub-cell centers per
/// cell. Output side is n * factor; pixel (i, j) sits at local grid
/// coordinates ((i + 0.5) / factor, (j + 0.5) / factor).
Image resample(const CoefficientGrid& coeffs, const Generator& gen, int factor);

struct Ellipse {
  Vec2 center{};
  double a = 1.0;
  double b = 1.0;
  double rotation = 0.0;
  double density = 1.0;
};

/// Length of the ray inside the ellipse.
double ellipse_chord(const Ellipse& e, const Ray& ray);

Sinogram ellipse_sinogram(const std::vector<Ellipse>& ellipses, const RaySet& rayset);

/// Point samples of the phantom on the same lattice `resample` uses.
Image phantom_raster(const std::vector<Ellipse>& ellipses, const GridSpec& grid, int factor);

/// Modified Shepp-Logan head scaled to `radius` about `center`.
std::vector<Ellipse> shepp_logan(Vec2 center, double radius);

/// Default phantom for a grid: Shepp-Logan filling 90% of the grid width.
std::vector<Ellipse> default_phantom(const GridSpec& grid);

std::vector<Ellipse> disk_phantom(Vec2 center, double radius, double density);

/// Axis-aligned box lo <= x < hi.
struct Rect {
  Vec2 lo{};
  Vec2 hi{};
  double density = 1.0;
};

double rect_chord(const Rect& r, const Ray& ray);

struct Phantom {
  std::vector<Ellipse> ellipses;
  std::vector<Rect> rects;
};

Sinogram phantom_sinogram(const Phantom& phantom, const RaySet& rayset);
Image phantom_raster(const Phantom& phantom, const GridSpec& grid, int factor);
/// Two overlapping boxes with edges on cell boundaries: exactly a pixel
/// expansion on `grid`.
Phantom block_phantom(const GridSpec& grid);

struct NoiseSpec {
  double variance = 1e-3;
  std::uint64_t seed = 0;
};

Sinogram add_noise(const Sinogram& sino, const NoiseSpec& spec);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / MSE); +inf for identical images.
double psnr(const Image& x, const Image& ref, double peak);
/// Peak taken as the maximum of `ref`.
double psnr(const Image& x, const Image& ref);

/// Mean SSIM over the valid region of an 11-tap Gaussian window
/// (sigma 1.5), C1 = (0.01 L)^2, C2 = (0.03 L)^2 with L the joint data range
/// max(x, ref) - min(x, ref). Both images need sides of at least 11.
double ssim(const Image& x, const Image& ref);

struct CorSearch {
  double min = -1.0;
  double max = 1.0;
  double step = 0.05;

  std::vector<double> candidates() const;
};

struct CorCandidate {
  double shift = 0.0;
  double residual = 0.0;
};

struct CorResult {
  double best_shift = 0.0;
  std::vector<CorCandidate> scores;  ///< ascending shift
};

/// Grid search over cor_shift scoring ||p - H c*|| after a short
/// reconstruction; ties go to the smallest |shift|.
CorResult calibrate_cor(const Sinogram& sino, const FanBeamConfig& config, const GridSpec& grid,
                        const Generator& gen, const CorSearch& search, const SolverConfig& cfg);

}  // namespace boxray
