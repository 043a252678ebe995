#include "boxray/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "boxray/error.hpp"

namespace boxray {

namespace {

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void require_same_shape(const Image& x, const Image& ref) {
  if (x.width != ref.width || x.height != ref.height || x.pixels.size() != ref.pixels.size()) {
    throw InvalidArgument("image shapes differ");
  }
}

}  // namespace

constexpr double kStagnation = 1e-14;

void SolverConfig::validate() const {
  if (iterations < 1) throw InvalidArgument("iterations must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and non-negative");
  if (!(tol >= 0.0)) throw InvalidArgument("tol must be non-negative");
}

std::vector<double> cg_solve(const LinearOperator& op, const std::vector<double>& p, const SolverConfig& cfg,
                             SolverTrace* trace) {
  cfg.validate();
  if (p.size() != op.rows()) {
    throw InvalidArgument("sinogram length " + std::to_string(p.size()) + " does not match operator rows " +
                          std::to_string(op.rows()));
  }
  const double lambda = cfg.lambda;
  std::vector<double> c(op.cols(), 0.0);
  std::vector<double> r = p;
  std::vector<double> s = op.apply_adjoint(r);
  std::vector<double> d = s;
  double gamma = dotv(s, s);
  const double s0 = std::sqrt(gamma);
  if (trace) {
    *trace = {};
    trace->residual.push_back(std::sqrt(dotv(r, r)));
    trace->normal_residual.push_back(s0);
  }
  if (!std::isfinite(gamma)) throw NumericalError("non-finite residual in CG", 0);

  for (int it = 1; it <= cfg.iterations; ++it) {
    if (gamma == 0.0) break;
    const std::vector<double> q = op.apply(d);
    const double delta = dotv(q, q) + lambda * dotv(d, d);
    if (!std::isfinite(delta)) throw NumericalError("non-finite curvature in CG", it);
    if (delta <= 0.0) break;
    const double alpha = gamma / delta;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += alpha * d[i];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * q[i];
    op.apply_adjoint(r, s);
    if (lambda != 0.0) {
      for (std::size_t i = 0; i < s.size(); ++i) s[i] -= lambda * c[i];
    }
    const double gamma_next = dotv(s, s);
    const double rnorm = std::sqrt(dotv(r, r));
    if (!std::isfinite(gamma_next) || !std::isfinite(rnorm)) {
      throw NumericalError("non-finite residual in CG", it);
    }
    if (trace) {
      trace->residual.push_back(rnorm);
      trace->normal_residual.push_back(std::sqrt(gamma_next));
      trace->iterations = it;
    }
    const double beta = gamma_next / gamma;
    gamma = gamma_next;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = s[i] + beta * d[i];
    if (std::sqrt(gamma) <= std::max(cfg.tol, kStagnation) * s0) break;
  }
  return c;
}

CoefficientGrid cg_solve(const RaySet& rayset, const Generator& gen, const Sinogram& sino, const GridSpec& grid,
                         const SolverConfig& cfg, SolverTrace* trace) {
  if (sino.values.size() != rayset.size()) {
    throw InvalidArgument("sinogram has " + std::to_string(sino.values.size()) + " values for " +
                          std::to_string(rayset.size()) + " rays");
  }
  const XrayOperator op(grid, rayset, gen);
  CoefficientGrid out(grid);
  out.data = cg_solve(op, sino.values, cfg, trace);
  return out;
}

Image resample(const CoefficientGrid& coeffs, const Generator& gen, int factor) {
  if (factor < 1) throw InvalidArgument("resample factor must be at least 1");
  const int n = coeffs.n();
  const int side = n * factor;
  const double radius = support_radius(gen);
  Image img(side, side);
  for (int j = 0; j < side; ++j) {
    const double y = (j + 0.5) / factor;
    const int q0 = std::max(0, static_cast<int>(std::ceil(y - 0.5 - radius)));
    const int q1 = std::min(n - 1, static_cast<int>(std::floor(y - 0.5 + radius)));
    for (int i = 0; i < side; ++i) {
      const double x = (i + 0.5) / factor;
      const int p0 = std::max(0, static_cast<int>(std::ceil(x - 0.5 - radius)));
      const int p1 = std::min(n - 1, static_cast<int>(std::floor(x - 0.5 + radius)));
      double acc = 0.0;
      for (int q = q0; q <= q1; ++q) {
        for (int p = p0; p <= p1; ++p) {
          const double c = coeffs.at(p, q);
          if (c == 0.0) continue;
          acc += c * eval_generator_2d(gen, Vec2{x - (p + 0.5), y - (q + 0.5)});
        }
      }
      img.at(i, j) = acc;
    }
  }
  return img;
}

double ellipse_chord(const Ellipse& e, const Ray& ray) {
  const double cr = std::cos(e.rotation);
  const double sr = std::sin(e.rotation);
  // Ray point and direction in the ellipse frame, scaled to the unit circle.
  const Vec2 o = ray.point_at(0.0) - e.center;
  const Vec2 d = ray.dir();
  const double ox = (cr * o.x + sr * o.y) / e.a;
  const double oy = (-sr * o.x + cr * o.y) / e.b;
  const double dx = (cr * d.x + sr * d.y) / e.a;
  const double dy = (-sr * d.x + cr * d.y) / e.b;
  const double A = dx * dx + dy * dy;
  const double B = 2.0 * (ox * dx + oy * dy);
  const double C = ox * ox + oy * oy - 1.0;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return 0.0;
  return std::sqrt(disc) / A;
}

Sinogram ellipse_sinogram(const std::vector<Ellipse>& ellipses, const RaySet& rayset) {
  Sinogram sino{rayset, std::vector<double>(rayset.size(), 0.0)};
  for (std::size_t m = 0; m < rayset.size(); ++m) {
    double acc = 0.0;
    for (const Ellipse& e : ellipses) acc += e.density * ellipse_chord(e, rayset.rays[m]);
    sino.values[m] = acc;
  }
  return sino;
}

Image phantom_raster(const std::vector<Ellipse>& ellipses, const GridSpec& grid, int factor) {
  if (factor < 1) throw InvalidArgument("raster factor must be at least 1");
  const int side = grid.n * factor;
  Image img(side, side);
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      const Vec2 x = grid.origin + Vec2{(i + 0.5) / factor, (j + 0.5) / factor};
      double acc = 0.0;
      for (const Ellipse& e : ellipses) {
        const Vec2 o = x - e.center;
        const double cr = std::cos(e.rotation);
        const double sr = std::sin(e.rotation);
        const double u = (cr * o.x + sr * o.y) / e.a;
        const double v = (-sr * o.x + cr * o.y) / e.b;
        if (u * u + v * v <= 1.0) acc += e.density;
      }
      img.at(i, j) = acc;
    }
  }
  return img;
}

std::vector<Ellipse> shepp_logan(Vec2 center, double radius) {
  struct Row {
    double density, a, b, x0, y0, deg;
  };
  static constexpr Row rows[] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},         {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},     {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},        {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  std::vector<Ellipse> out;
  for (const Row& r : rows) {
    out.push_back(Ellipse{center + radius * Vec2{r.x0, r.y0}, radius * r.a, radius * r.b,
                          r.deg * std::numbers::pi / 180.0, r.density});
  }
  return out;
}

std::vector<Ellipse> default_phantom(const GridSpec& grid) {
  return shepp_logan(grid.center(), 0.45 * grid.n);
}

std::vector<Ellipse> disk_phantom(Vec2 center, double radius, double density) {
  if (!(radius > 0.0)) throw InvalidArgument("disk radius must be positive");
  return {Ellipse{center, radius, radius, 0.0, density}};
}

double rect_chord(const Rect& r, const Ray& ray) {
  const Vec2 o = ray.point_at(0.0);
  const Vec2 d = ray.dir();
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  const double lo[2] = {r.lo.x, r.lo.y}, hi[2] = {r.hi.x, r.hi.y};
  const double os[2] = {o.x, o.y}, ds[2] = {d.x, d.y};
  for (int a = 0; a < 2; ++a) {
    if (std::abs(ds[a]) < 1e-15) {
      if (os[a] < lo[a] || os[a] >= hi[a]) return 0.0;
      continue;
    }
    double ta = (lo[a] - os[a]) / ds[a], tb = (hi[a] - os[a]) / ds[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t1 > t0 ? t1 - t0 : 0.0;
}

Sinogram phantom_sinogram(const Phantom& phantom, const RaySet& rayset) {
  Sinogram sino = ellipse_sinogram(phantom.ellipses, rayset);
  for (std::size_t m = 0; m < rayset.size(); ++m) {
    for (const Rect& r : phantom.rects) sino.values[m] += r.density * rect_chord(r, rayset.rays[m]);
  }
  return sino;
}

Image phantom_raster(const Phantom& phantom, const GridSpec& grid, int factor) {
  Image img = phantom_raster(phantom.ellipses, grid, factor);
  for (int j = 0; j < img.height; ++j) {
    for (int i = 0; i < img.width; ++i) {
      const Vec2 x = grid.origin + Vec2{(i + 0.5) / factor, (j + 0.5) / factor};
      for (const Rect& r : phantom.rects) {
        if (x.x >= r.lo.x && x.x < r.hi.x && x.y >= r.lo.y && x.y < r.hi.y) img.at(i, j) += r.density;
      }
    }
  }
  return img;
}

Phantom block_phantom(const GridSpec& grid) {
  const int n = grid.n;
  auto cell = [&](int p, int q) { return grid.origin + Vec2{double(p), double(q)}; };
  Phantom out;
  out.rects.push_back(Rect{cell(n / 4, n / 4), cell(5 * n / 8, 3 * n / 4), 1.0});
  out.rects.push_back(Rect{cell(n / 2, 3 * n / 8), cell(3 * n / 4, 5 * n / 8), 0.5});
  return out;
}

Sinogram add_noise(const Sinogram& sino, const NoiseSpec& spec) {
  if (!(spec.variance >= 0.0)) throw InvalidArgument("noise variance must be non-negative");
  Sinogram out = sino;
  if (spec.variance == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(spec.variance));
  for (double& v : out.values) v += normal(rng);
  return out;
}

double psnr(const Image& x, const Image& ref, double peak) {
  require_same_shape(x, ref);
  if (x.pixels.empty()) throw InvalidArgument("empty image");
  double sse = 0.0;
  for (std::size_t i = 0; i < x.pixels.size(); ++i) {
    const double d = x.pixels[i] - ref.pixels[i];
    sse += d * d;
  }
  if (sse == 0.0) return kInfinitePsnr;
  const double mse = sse / static_cast<double>(x.pixels.size());
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const Image& x, const Image& ref) {
  require_same_shape(x, ref);
  if (ref.pixels.empty()) throw InvalidArgument("empty image");
  return psnr(x, ref, *std::max_element(ref.pixels.begin(), ref.pixels.end()));
}

double ssim(const Image& x, const Image& ref) {
  require_same_shape(x, ref);
  constexpr int kTaps = 11;
  constexpr double kSigma = 1.5;
  if (x.width < kTaps || x.height < kTaps) throw InvalidArgument("ssim needs images of at least 11x11");

  double w[kTaps];
  double wsum = 0.0;
  for (int i = 0; i < kTaps; ++i) {
    const double t = i - kTaps / 2;
    w[i] = std::exp(-t * t / (2.0 * kSigma * kSigma));
    wsum += w[i];
  }
  for (double& v : w) v /= wsum;

  const auto [xmin, xmax] = std::minmax_element(x.pixels.begin(), x.pixels.end());
  const auto [rmin, rmax] = std::minmax_element(ref.pixels.begin(), ref.pixels.end());
  double range = std::max(*xmax, *rmax) - std::min(*xmin, *rmin);
  if (range <= 0.0) range = 1.0;
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);

  const int W = x.width, H = x.height;
  const int ow = W - kTaps + 1, oh = H - kTaps + 1;
  // Separable valid-mode filtering of x, y, x^2, y^2, xy.
  auto filter = [&](auto&& value) {
    std::vector<double> rows(static_cast<std::size_t>(H) * ow);
    for (int j = 0; j < H; ++j) {
      for (int i = 0; i < ow; ++i) {
        double acc = 0.0;
        for (int t = 0; t < kTaps; ++t) acc += w[t] * value(i + t, j);
        rows[static_cast<std::size_t>(j) * ow + i] = acc;
      }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int j = 0; j < oh; ++j) {
      for (int i = 0; i < ow; ++i) {
        double acc = 0.0;
        for (int t = 0; t < kTaps; ++t) acc += w[t] * rows[static_cast<std::size_t>(j + t) * ow + i];
        out[static_cast<std::size_t>(j) * ow + i] = acc;
      }
    }
    return out;
  };
  const auto mx = filter([&](int i, int j) { return x.at(i, j); });
  const auto my = filter([&](int i, int j) { return ref.at(i, j); });
  const auto xx = filter([&](int i, int j) { return x.at(i, j) * x.at(i, j); });
  const auto yy = filter([&](int i, int j) { return ref.at(i, j) * ref.at(i, j); });
  const auto xy = filter([&](int i, int j) { return x.at(i, j) * ref.at(i, j); });

  double total = 0.0;
  for (std::size_t k = 0; k < mx.size(); ++k) {
    const double vx = xx[k] - mx[k] * mx[k];
    const double vy = yy[k] - my[k] * my[k];
    const double cov = xy[k] - mx[k] * my[k];
    total += ((2.0 * mx[k] * my[k] + c1) * (2.0 * cov + c2)) /
             ((mx[k] * mx[k] + my[k] * my[k] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

std::vector<double> CorSearch::candidates() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("search step must be positive");
  if (!std::isfinite(min) || !std::isfinite(max) || max < min) throw InvalidArgument("empty search range");
  const long count = static_cast<long>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) {
    double s = min + static_cast<double>(i) * step;
    if (std::abs(s) < 1e-12 * step) s = 0.0;
    out.push_back(s);
  }
  return out;
}

CorResult calibrate_cor(const Sinogram& sino, const FanBeamConfig& config, const GridSpec& grid,
                        const Generator& gen, const CorSearch& search, const SolverConfig& cfg) {
  const std::vector<double> shifts = search.candidates();
  CorResult result;
  for (double shift : shifts) {
    FanBeamConfig trial = config;
    trial.cor_shift = shift;
    const RaySet rays = fanbeam_rayset(trial, grid);
    if (rays.size() != sino.values.size()) {
      throw InvalidArgument("sinogram length does not match the fan-beam configuration");
    }
    const XrayOperator op(grid, rays, gen);
    const std::vector<double> c = cg_solve(op, sino.values, cfg);
    const std::vector<double> hc = op.apply(c);
    double sse = 0.0;
    for (std::size_t m = 0; m < hc.size(); ++m) {
      const double d = sino.values[m] - hc[m];
      sse += d * d;
    }
    result.scores.push_back({shift, std::sqrt(sse)});
  }
  const CorCandidate* best = &result.scores.front();
  for (const CorCandidate& cand : result.scores) {
    if (cand.residual < best->residual ||
        (cand.residual == best->residual && std::abs(cand.shift) < std::abs(best->shift))) {
      best = &cand;
    }
  }
  result.best_shift = best->shift;
  return result;
}

}  // namespace boxray
