#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boxray/geometry.hpp"

namespace boxray {

enum class GeneratorKind { Pixel, BoxSpline3, BoxSpline4, TensorBSpline, GenericBoxSpline };

/// A box-spline generator: the convolution of centered unit-mass segments
/// [-u_d/2, u_d/2], one per direction. Every 1D factor has unit integral.
class Generator {
 public:
  static Generator pixel();
  static Generator box_spline3();
  static Generator box_spline4();
  static Generator tensor_bspline(int degree);
  static Generator generic(std::vector<Vec2> directions);

  GeneratorKind kind() const { return kind_; }
  /// B-spline degree for TensorBSpline, 0 otherwise.
  int degree() const { return degree_; }
  const std::vector<Vec2>& directions() const { return directions_; }
  /// Short name used by the CLI: pixel, box3, box4, bspline<n>, generic.
  std::string name() const;

 private:
  Generator(GeneratorKind kind, int degree, std::vector<Vec2> directions);

  GeneratorKind kind_;
  int degree_;
  std::vector<Vec2> directions_;
};

/// Accepts "pixel", "box3", "box4", "bspline<n>" and "bspline <n>".
Generator parse_generator(std::string_view text);

/// The projected profile y -> phi_theta(y) in truncated-power form.
///
/// For the D non-degenerate widths a_d = |<theta_perp, u_d>| (theta_perp the ray normal)
/// the profile is
///   scale * sum_S (-1)^|S| (y + W/2 - sum_{d in S} a_d)_+^(D-1),
/// W = sum a_d, scale = 1 / ((D-1)! prod a_d). Coincident subset sums are
/// merged into one knot. `breaks`/`pieces` hold the same function as local
/// polynomials per interval, built by exact convolution of the rects; this
/// is what eval_profile uses.
struct ProjectedProfile {
  std::vector<double> knots;         ///< sorted, on [0, W]
  std::vector<double> coefficients;  ///< plus-function weight per knot
  int degree = -1;                   ///< D - 1; -1 marks a Dirac profile
  double scale = 0.0;
  double center_shift = 0.0;         ///< W / 2
  std::vector<double> breaks;        ///< interval endpoints on [0, W]
  std::vector<double> pieces;        ///< (degree + 1) coefficients per interval

  bool is_dirac() const { return degree < 0; }
  double width() const { return 2.0 * center_shift; }
};

/// Widths below this are treated as Dirac factors.
inline constexpr double kDegenerateWidth = 1e-9;

ProjectedProfile project_generator(const Generator& gen, double theta);

/// Exact piecewise-polynomial evaluation; zero outside the open support.
double eval_profile(const ProjectedProfile& profile, double y);

/// Direct truncated-power sum, without the local re-expansion. Slower; kept
/// as a reference path.
double eval_profile_plus(const ProjectedProfile& profile, double y);

/// Closed-form three-direction box-spline profile.
double eval_box3_fast(double theta, double y);

/// Knot vector (0, s, 2s + c, c, s + 2c, 2(s + c)), s = sin, c = cos. For
/// theta in (0, pi/4) these are the box3 knots at ray angle -theta.
std::array<double, 6> alpha_knots(double theta);

/// Closed-form profile of the tensor B-spline beta^n x beta^n (n <= 3).
double eval_tensor_bspline_fast(int degree, double theta, double y);
inline double eval_tensor_bspline2_fast(double theta, double y) {
  return eval_tensor_bspline_fast(2, theta, y);
}

/// phi_theta for a single angle, using a closed form when one exists.
class AngleKernel {
 public:
  AngleKernel(const Generator& gen, double theta);

  double operator()(double y) const;
  double half_width() const { return half_width_; }

 private:
  enum class Path { Engine, Box3, Tensor };
  Path path_ = Path::Engine;
  ProjectedProfile profile_;
  // Box3: widths {p, r, p + r}. Tensor: widths a = p_, b = r_, n + 1 each.
  double p_ = 0.0, r_ = 0.0;
  int degree_ = 0;
  double half_width_ = 0.0;
};

/// Circumradius of the centered support polygon.
double support_radius(const Generator& gen);

/// Girth L = 2K + 1 of the smallest octagon {|x1|,|x2| <= K + 1/2,
/// |x1 +- x2| <= K + 1} that contains the support.
double octagon_girth(const Generator& gen);

int disk_neighbor_bound(double radius);
int octagon_neighbor_bound(double girth);

/// min of the disk and octagon bounds.
int neighbor_count(const Generator& gen);

/// Neighbor count used by the tracer (the octagon bound).
int tracer_neighbor_count(const Generator& gen);

/// Spatial value of the centered generator at x.
double eval_generator_2d(const Generator& gen, Vec2 x);

/// Centered 1D B-spline of the given degree. Degree 0 is the half-open
/// indicator of [-1/2, 1/2).
double bspline(int degree, double x);

/// Fourier transform of the generator: prod_d sinc(<xi, u_d> / 2pi).
std::complex<double> fourier_hat(const Generator& gen, Vec2 xi);

}  // namespace boxray
