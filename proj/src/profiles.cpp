#include "boxray/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "boxray/error.hpp"

namespace boxray {

namespace {

constexpr Vec2 kE1{1.0, 0.0};
constexpr Vec2 kE2{0.0, 1.0};

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

std::vector<double> projected_widths(const Generator& gen, double theta) {
  // Rect widths along the ray normal (sin, -cos).
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> widths;
  for (Vec2 u : gen.directions()) {
    const double a = std::abs(s * u.x - c * u.y);
    if (a >= kDegenerateWidth) widths.push_back(a);
  }
  return widths;
}

// Piecewise polynomial on breakpoints x[0] < ... < x[K], zero outside.
// Interval i holds sum_j c[i*(deg+1)+j] * (s - x[i])^j.
struct Piecewise {
  std::vector<double> x;
  int deg = 0;
  std::vector<double> c;

  std::size_t intervals() const { return x.size() - 1; }
};

// Coefficients of P(delta + u) in powers of u.
void taylor_shift(const double* coeffs, int n_coeffs, double delta, double* out) {
  for (int k = 0; k < n_coeffs; ++k) {
    double acc = 0.0;
    for (int j = n_coeffs - 1; j >= k; --j) {
      acc = acc * delta + coeffs[j] * binomial(j, k);
    }
    out[k] = acc;
  }
}

std::vector<double> merge_sorted(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values) {
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  }
  return out;
}

// Convolution of unit-mass rects on [0, w_d], built one factor at a time as
// (G(s) - G(s - a)) / a with G the antiderivative of the previous stage.
Piecewise convolve_rects(std::vector<double> widths) {
  std::sort(widths.begin(), widths.end());
  Piecewise g;
  g.x = {0.0, widths[0]};
  g.deg = 0;
  g.c = {1.0 / widths[0]};
  double total_width = widths[0];

  for (std::size_t d = 1; d < widths.size(); ++d) {
    const double a = widths[d];
    const int gdeg = g.deg + 1;  // antiderivative degree
    const int gn = gdeg + 1;
    const std::size_t k_old = g.intervals();

    std::vector<double> anti(k_old * gn, 0.0);
    double running = 0.0;
    for (std::size_t i = 0; i < k_old; ++i) {
      double* row = &anti[i * gn];
      row[0] = running;
      const double h = g.x[i + 1] - g.x[i];
      double hp = h;
      for (int j = 0; j <= g.deg; ++j) {
        row[j + 1] = g.c[i * (g.deg + 1) + j] / (j + 1);
        running += row[j + 1] * hp;
        hp *= h;
      }
    }
    const double mass = running;

    // Antiderivative re-expanded at z, valid on [z, z + h].
    std::vector<double> tmp(gn);
    auto local_antiderivative = [&](double z, double h, double* out) {
      const double mid = z + 0.5 * h;
      std::fill(out, out + gn, 0.0);
      if (mid <= g.x.front()) return;
      if (mid >= g.x.back()) {
        out[0] = mass;
        return;
      }
      const auto it = std::upper_bound(g.x.begin(), g.x.end(), mid);
      const std::size_t i = static_cast<std::size_t>(it - g.x.begin()) - 1;
      taylor_shift(&anti[i * gn], gn, z - g.x[i], out);
    };

    total_width += a;
    std::vector<double> breaks = g.x;
    for (double v : g.x) breaks.push_back(v + a);
    breaks = merge_sorted(std::move(breaks), 1e-12 * std::max(1.0, total_width));

    Piecewise next;
    next.x = breaks;
    next.deg = gdeg;
    next.c.assign((breaks.size() - 1) * gn, 0.0);
    std::vector<double> hi(gn), lo(gn);
    for (std::size_t l = 0; l + 1 < breaks.size(); ++l) {
      const double z = breaks[l];
      const double h = breaks[l + 1] - z;
      local_antiderivative(z, h, hi.data());
      local_antiderivative(z - a, h, lo.data());
      for (int j = 0; j < gn; ++j) next.c[l * gn + j] = (hi[j] - lo[j]) / a;
    }
    g = std::move(next);
  }
  return g;
}

bool same_direction_multiset(std::vector<Vec2> a, std::vector<Vec2> b) {
  if (a.size() != b.size()) return false;
  auto canon = [](Vec2 u) {
    if (u.x < 0.0 || (u.x == 0.0 && u.y < 0.0)) return Vec2{-u.x, -u.y};
    return u;
  };
  auto less = [](Vec2 p, Vec2 q) { return p.x < q.x || (p.x == q.x && p.y < q.y); };
  for (auto& u : a) u = canon(u);
  for (auto& u : b) u = canon(u);
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].x - b[i].x) > 1e-15 || std::abs(a[i].y - b[i].y) > 1e-15) return false;
  }
  return true;
}

// Three-direction hat: 1 - max(|x|, |y|, |x - y|) on its hexagon.
double box3_spatial(double x, double y) {
  return std::max(0.0, 1.0 - std::max({std::abs(x), std::abs(y), std::abs(x - y)}));
}

// Integral of the hat along t -> (x - t, y + t), t in [-1/2, 1/2]. The hat is
// linear between crossings of its mesh lines, so trapezoids are exact.
double box4_spatial(double x, double y) {
  if (std::abs(x) >= 1.5 || std::abs(y) >= 1.5 || std::abs(x + y) >= 2.0 ||
      std::abs(x - y) >= 2.0) {
    return 0.0;
  }
  std::array<double, 11> t{};
  std::size_t n = 0;
  t[n++] = -0.5;
  t[n++] = 0.5;
  for (int k = -1; k <= 1; ++k) {
    for (double c : {x - k, k - y, 0.5 * (x - y - k)}) {
      if (c > -0.5 && c < 0.5) t[n++] = c;
    }
  }
  std::sort(t.begin(), t.begin() + n);
  double sum = 0.0;
  double prev_t = t[0];
  double prev_f = box3_spatial(x - prev_t, y + prev_t);
  for (std::size_t i = 1; i < n; ++i) {
    const double f = box3_spatial(x - t[i], y + t[i]);
    sum += 0.5 * (f + prev_f) * (t[i] - prev_t);
    prev_t = t[i];
    prev_f = f;
  }
  return sum;
}

}  // namespace

Generator::Generator(GeneratorKind kind, int degree, std::vector<Vec2> directions)
    : kind_(kind), degree_(degree), directions_(std::move(directions)) {}

Generator Generator::pixel() { return Generator(GeneratorKind::Pixel, 0, {kE1, kE2}); }

Generator Generator::box_spline3() {
  return Generator(GeneratorKind::BoxSpline3, 0, {kE1, kE2, Vec2{1.0, 1.0}});
}

Generator Generator::box_spline4() {
  return Generator(GeneratorKind::BoxSpline4, 0, {kE1, kE2, Vec2{1.0, 1.0}, Vec2{1.0, -1.0}});
}

Generator Generator::tensor_bspline(int degree) {
  if (degree < 0 || degree > 3) throw InvalidArgument("tensor B-spline degree must be in [0, 3]");
  std::vector<Vec2> dirs;
  for (int i = 0; i <= degree; ++i) dirs.push_back(kE1);
  for (int i = 0; i <= degree; ++i) dirs.push_back(kE2);
  return Generator(GeneratorKind::TensorBSpline, degree, std::move(dirs));
}

Generator Generator::generic(std::vector<Vec2> directions) {
  if (directions.empty()) throw InvalidArgument("box-spline needs at least one direction");
  if (directions.size() > 24) throw InvalidArgument("box-spline limited to 24 directions");
  for (Vec2 u : directions) {
    if (!std::isfinite(u.x) || !std::isfinite(u.y) || norm(u) == 0.0) {
      throw InvalidArgument("box-spline directions must be finite and non-zero");
    }
  }
  return Generator(GeneratorKind::GenericBoxSpline, 0, std::move(directions));
}

std::string Generator::name() const {
  switch (kind_) {
    case GeneratorKind::Pixel: return "pixel";
    case GeneratorKind::BoxSpline3: return "box3";
    case GeneratorKind::BoxSpline4: return "box4";
    case GeneratorKind::TensorBSpline: return "bspline" + std::to_string(degree_);
    case GeneratorKind::GenericBoxSpline: return "generic";
  }
  return "unknown";
}

Generator parse_generator(std::string_view text) {
  std::string s(text);
  if (s == "pixel") return Generator::pixel();
  if (s == "box3") return Generator::box_spline3();
  if (s == "box4") return Generator::box_spline4();
  if (s.rfind("bspline", 0) == 0) {
    std::string rest = s.substr(7);
    rest.erase(0, rest.find_first_not_of(" :"));
    if (rest.size() == 1 && rest[0] >= '0' && rest[0] <= '9') {
      return Generator::tensor_bspline(rest[0] - '0');
    }
  }
  throw InvalidArgument("unknown generator '" + s + "' (expected pixel, box3, box4, bspline <n>)");
}

ProjectedProfile project_generator(const Generator& gen, double theta) {
  if (gen.directions().empty()) throw InvalidArgument("generator has no directions");
  if (!std::isfinite(theta)) throw InvalidArgument("angle must be finite");
  const std::vector<double> widths = projected_widths(gen, theta);
  ProjectedProfile prof;
  if (widths.empty()) return prof;  // Dirac

  const int dim = static_cast<int>(widths.size());
  double width_sum = 0.0;
  double prod = 1.0;
  for (double a : widths) {
    width_sum += a;
    prod *= a;
  }
  prof.degree = dim - 1;
  prof.scale = 1.0 / (factorial(dim - 1) * prod);
  prof.center_shift = 0.5 * width_sum;

  // Subset sums with signs, merged per unique knot.
  std::vector<std::pair<double, double>> terms;
  terms.reserve(std::size_t{1} << dim);
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (int d = 0; d < dim; ++d) {
      if (mask & (1u << d)) {
        sum += widths[d];
        ++count;
      }
    }
    terms.emplace_back(sum, (count % 2) ? -1.0 : 1.0);
  }
  std::sort(terms.begin(), terms.end());
  const double tol = 1e-12 * std::max(1.0, width_sum);
  for (const auto& [knot, sign] : terms) {
    if (!prof.knots.empty() && knot - prof.knots.back() <= tol) {
      prof.coefficients.back() += sign;
    } else {
      prof.knots.push_back(knot);
      prof.coefficients.push_back(sign);
    }
  }
  std::size_t w = 0;
  for (std::size_t i = 0; i < prof.knots.size(); ++i) {
    if (prof.coefficients[i] != 0.0) {
      prof.knots[w] = prof.knots[i];
      prof.coefficients[w] = prof.coefficients[i];
      ++w;
    }
  }
  prof.knots.resize(w);
  prof.coefficients.resize(w);

  Piecewise pw = convolve_rects(widths);
  prof.breaks = std::move(pw.x);
  prof.pieces = std::move(pw.c);
  return prof;
}

double eval_profile(const ProjectedProfile& profile, double y) {
  if (profile.is_dirac()) return 0.0;
  // Profiles are even; evaluate on the left half only.
  const double s = profile.center_shift - std::abs(y);
  if (!(s > 0.0)) return 0.0;
  const auto& br = profile.breaks;
  auto it = std::upper_bound(br.begin(), br.end(), s);
  std::size_t i = static_cast<std::size_t>(it - br.begin());
  i = std::clamp<std::size_t>(i, 1, br.size() - 1) - 1;
  const int n = profile.degree + 1;
  const double u = s - br[i];
  const double* c = &profile.pieces[i * n];
  double acc = 0.0;
  for (int j = n - 1; j >= 0; --j) acc = acc * u + c[j];
  return acc;
}

double eval_profile_plus(const ProjectedProfile& profile, double y) {
  if (profile.is_dirac()) return 0.0;
  const double s = y + profile.center_shift;
  if (!(s > 0.0) || !(s < profile.width())) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < profile.knots.size(); ++i) {
    const double t = s - profile.knots[i];
    if (t <= 0.0) break;
    acc += profile.coefficients[i] * ipow(t, profile.degree);
  }
  return profile.scale * acc;
}

namespace {

// Widths {p, r, p + r} of the three-direction box-spline at theta.
void box3_widths(double theta, double& p, double& r) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double ac = std::abs(c);
  const double as = std::abs(s);
  // Third width |s - c| is |s| + |c| when the signs differ.
  if (c * s <= 0.0) {
    p = std::min(ac, as);
    r = std::max(ac, as);
  } else {
    p = std::min(ac, as);
    r = std::abs(ac - as);
    if (p > r) std::swap(p, r);
  }
}

// x in [0, p + r] measured from the left support end, p <= r.
double box3_left_half(double p, double r, double x) {
  if (x <= 0.0) return 0.0;
  if (x < p) return x * x / (2.0 * p * r * (p + r));
  if (x < r) return (2.0 * x - p) / (2.0 * r * (p + r));
  // Right half mirrors the left one.
  const double m = x - p - r;
  return 1.0 / (p + r) - m * m / (2.0 * p * r * (p + r));
}

bool box3_degenerate(double p, double r) { return p * r < 1e-9; }

// E[(x - T)_+^n] / n! with T a sum of n + 1 uniforms on [0, a].
double tensor_inner(int n, double a, double x) {
  if (x <= 0.0) return 0.0;
  const double support = (n + 1) * a;
  if (x >= support) {
    const double m = x - 0.5 * support;
    const double var = (n + 1) * a * a / 12.0;
    switch (n) {
      case 0: return 1.0;
      case 1: return m;
      case 2: return 0.5 * (m * m + var);
      default: return (m * m * m + 3.0 * m * var) / 6.0;
    }
  }
  double acc = 0.0;
  for (int i = 0; i <= n + 1; ++i) {
    const double t = x - i * a;
    if (t <= 0.0) break;
    acc += ((i % 2) ? -1.0 : 1.0) * binomial(n + 1, i) * ipow(t, 2 * n + 1);
  }
  return acc / (factorial(2 * n + 1) * ipow(a, n + 1));
}

double tensor_closed_form(int n, double a, double b, double y) {
  const double s = 0.5 * (n + 1) * (a + b) - std::abs(y);
  if (!(s > 0.0)) return 0.0;
  double acc = 0.0;
  for (int j = 0; j <= n + 1; ++j) {
    const double x = s - j * b;
    if (x <= 0.0) break;
    acc += ((j % 2) ? -1.0 : 1.0) * binomial(n + 1, j) * tensor_inner(n, a, x);
  }
  return acc / ipow(b, n + 1);
}

}  // namespace

double eval_box3_fast(double theta, double y) {
  double p = 0.0, r = 0.0;
  box3_widths(theta, p, r);
  if (box3_degenerate(p, r)) {
    return eval_profile(project_generator(Generator::box_spline3(), theta), y);
  }
  return box3_left_half(p, r, p + r - std::abs(y));
}

std::array<double, 6> alpha_knots(double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return {0.0, s, 2.0 * s + c, c, s + 2.0 * c, 2.0 * (s + c)};
}

double eval_tensor_bspline_fast(int degree, double theta, double y) {
  if (degree < 0 || degree > 3) throw InvalidArgument("tensor B-spline degree must be in [0, 3]");
  const double as = std::abs(std::sin(theta));
  const double ac = std::abs(std::cos(theta));
  const double a = std::min(as, ac);
  const double b = std::max(as, ac);
  if (a * b < 1e-9) {
    return eval_profile(project_generator(Generator::tensor_bspline(degree), theta), y);
  }
  return tensor_closed_form(degree, a, b, y);
}

AngleKernel::AngleKernel(const Generator& gen, double theta) {
  if (gen.kind() == GeneratorKind::BoxSpline3) {
    box3_widths(theta, p_, r_);
    if (!box3_degenerate(p_, r_)) {
      path_ = Path::Box3;
      half_width_ = p_ + r_;
      return;
    }
  }
  if (gen.kind() == GeneratorKind::TensorBSpline) {
    const double as = std::abs(std::sin(theta));
    const double ac = std::abs(std::cos(theta));
    p_ = std::min(as, ac);
    r_ = std::max(as, ac);
    if (p_ * r_ >= 1e-9) {
      path_ = Path::Tensor;
      degree_ = gen.degree();
      half_width_ = 0.5 * (degree_ + 1) * (p_ + r_);
      return;
    }
  }
  path_ = Path::Engine;
  profile_ = project_generator(gen, theta);
  half_width_ = profile_.center_shift;
}

double AngleKernel::operator()(double y) const {
  switch (path_) {
    case Path::Box3: return box3_left_half(p_, r_, half_width_ - std::abs(y));
    case Path::Tensor: return tensor_closed_form(degree_, p_, r_, y);
    case Path::Engine: break;
  }
  return eval_profile(profile_, y);
}

namespace {

struct SupportExtents {
  double radius = 0.0;
  double half_x = 0.0;
  double half_y = 0.0;
  double half_diag = 0.0;  // max over the zonotope of |x1 + x2| and |x1 - x2|
};

SupportExtents support_extents(const Generator& gen) {
  SupportExtents e;
  double sum_plus = 0.0, sum_minus = 0.0;
  for (Vec2 u : gen.directions()) {
    e.half_x += 0.5 * std::abs(u.x);
    e.half_y += 0.5 * std::abs(u.y);
    sum_plus += 0.5 * std::abs(u.x + u.y);
    sum_minus += 0.5 * std::abs(u.x - u.y);
  }
  e.half_diag = std::max(sum_plus, sum_minus);

  // Zonotope vertices: one per angular sector between direction normals.
  std::vector<double> critical;
  for (Vec2 u : gen.directions()) {
    double phi = std::atan2(u.y, u.x) + 0.5 * std::numbers::pi;
    for (int k = 0; k < 2; ++k) {
      double v = std::fmod(phi + k * std::numbers::pi, 2.0 * std::numbers::pi);
      if (v < 0.0) v += 2.0 * std::numbers::pi;
      critical.push_back(v);
    }
  }
  std::sort(critical.begin(), critical.end());
  for (std::size_t i = 0; i < critical.size(); ++i) {
    const double lo = critical[i];
    const double hi = (i + 1 < critical.size()) ? critical[i + 1] : critical[0] + 2.0 * std::numbers::pi;
    if (hi - lo < 1e-12) continue;
    const double mid = 0.5 * (lo + hi);
    const Vec2 v{std::cos(mid), std::sin(mid)};
    Vec2 vertex{};
    for (Vec2 u : gen.directions()) {
      vertex = vertex + ((dot(u, v) >= 0.0) ? 0.5 : -0.5) * u;
    }
    e.radius = std::max(e.radius, norm(vertex));
  }
  return e;
}

}  // namespace

double support_radius(const Generator& gen) { return support_extents(gen).radius; }

double octagon_girth(const Generator& gen) {
  const SupportExtents e = support_extents(gen);
  const double need = std::max({e.half_x - 0.5, e.half_y - 0.5, e.half_diag - 1.0});
  const int k = std::max(0, static_cast<int>(std::ceil(need - 1e-9)));
  return 2.0 * k + 1.0;
}

int disk_neighbor_bound(double radius) {
  return std::max(0, static_cast<int>(std::ceil(std::sqrt(2.0) * radius - 1.0 - 1e-9)));
}

int octagon_neighbor_bound(double girth) {
  return std::max(0, static_cast<int>(std::floor(0.5 * girth + 1e-9)));
}

int neighbor_count(const Generator& gen) {
  return std::min(disk_neighbor_bound(support_radius(gen)), octagon_neighbor_bound(octagon_girth(gen)));
}

int tracer_neighbor_count(const Generator& gen) { return octagon_neighbor_bound(octagon_girth(gen)); }

double bspline(int degree, double x) {
  const double ax = std::abs(x);
  switch (degree) {
    case 0: return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
    case 1: return ax < 1.0 ? 1.0 - ax : 0.0;
    case 2:
      if (ax < 0.5) return 0.75 - ax * ax;
      if (ax < 1.5) return 0.5 * (1.5 - ax) * (1.5 - ax);
      return 0.0;
    case 3:
      if (ax < 1.0) return 2.0 / 3.0 - ax * ax + 0.5 * ax * ax * ax;
      if (ax < 2.0) return (2.0 - ax) * (2.0 - ax) * (2.0 - ax) / 6.0;
      return 0.0;
    default: break;
  }
  if (degree < 0) throw InvalidArgument("B-spline degree must be non-negative");
  double acc = 0.0;
  for (int k = 0; k <= degree + 1; ++k) {
    const double t = x + 0.5 * (degree + 1) - k;
    if (t > 0.0) acc += ((k % 2) ? -1.0 : 1.0) * binomial(degree + 1, k) * ipow(t, degree);
  }
  return acc / factorial(degree);
}

double eval_generator_2d(const Generator& gen, Vec2 x) {
  GeneratorKind kind = gen.kind();
  int degree = gen.degree();
  if (kind == GeneratorKind::GenericBoxSpline) {
    const auto& d = gen.directions();
    if (same_direction_multiset(d, Generator::box_spline3().directions())) {
      kind = GeneratorKind::BoxSpline3;
    } else if (same_direction_multiset(d, Generator::box_spline4().directions())) {
      kind = GeneratorKind::BoxSpline4;
    } else {
      bool matched = false;
      for (int n = 0; n <= 3 && !matched; ++n) {
        if (same_direction_multiset(d, Generator::tensor_bspline(n).directions())) {
          kind = GeneratorKind::TensorBSpline;
          degree = n;
          matched = true;
        }
      }
      if (!matched) throw InvalidArgument("no spatial form for this direction set");
    }
  }
  switch (kind) {
    case GeneratorKind::Pixel: return bspline(0, x.x) * bspline(0, x.y);
    case GeneratorKind::TensorBSpline: return bspline(degree, x.x) * bspline(degree, x.y);
    case GeneratorKind::BoxSpline3: return box3_spatial(x.x, x.y);
    case GeneratorKind::BoxSpline4: return box4_spatial(x.x, x.y);
    case GeneratorKind::GenericBoxSpline: break;
  }
  throw InvalidArgument("no spatial form for this generator");
}

std::complex<double> fourier_hat(const Generator& gen, Vec2 xi) {
  double acc = 1.0;
  for (Vec2 u : gen.directions()) {
    const double half = 0.5 * dot(xi, u);
    acc *= (half == 0.0) ? 1.0 : std::sin(half) / half;
  }
  return {acc, 0.0};
}

}  // namespace boxray
