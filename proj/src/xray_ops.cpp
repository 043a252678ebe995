#include "boxray/xray_ops.hpp"

#include <cmath>
#include <random>

#include "boxray/error.hpp"
#include "boxray/parallel.hpp"
#include "boxray/tracer.hpp"

namespace boxray {

std::vector<double> LinearOperator::apply(std::span<const double> x) const {
  std::vector<double> y(rows());
  apply(x, y);
  return y;
}

std::vector<double> LinearOperator::apply_adjoint(std::span<const double> y) const {
  std::vector<double> x(cols());
  apply_adjoint(y, x);
  return x;
}

XrayOperator::XrayOperator(GridSpec grid, RaySet rays, Generator gen, int workers)
    : grid_(grid),
      rays_(std::move(rays)),
      gen_(std::move(gen)),
      neighbors_(tracer_neighbor_count(gen_)),
      workers_(workers > 0 ? workers : worker_count()) {
  grid_.validate();
}

void XrayOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols() || y.size() != rows()) {
    throw InvalidArgument("forward: coefficient or sinogram size does not match the operator");
  }
  parallel_chunks(rays_.size(), workers_, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      const Ray& ray = rays_.rays[m];
      const AngleKernel kernel(gen_, ray.theta());
      double acc = 0.0;
      for_each_weight(grid_, ray, kernel, neighbors_, [&](std::size_t idx, double w) { acc += x[idx] * w; });
      y[m] = acc;
    }
  });
}

void XrayOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
  if (x.size() != cols() || y.size() != rows()) {
    throw InvalidArgument("adjoint: coefficient or sinogram size does not match the operator");
  }
  auto scatter = [&](std::size_t begin, std::size_t end, std::span<double> out) {
    for (std::size_t m = begin; m < end; ++m) {
      const double v = y[m];
      if (v == 0.0) continue;
      const Ray& ray = rays_.rays[m];
      const AngleKernel kernel(gen_, ray.theta());
      for_each_weight(grid_, ray, kernel, neighbors_, [&](std::size_t idx, double w) { out[idx] += v * w; });
    }
  };
  std::fill(x.begin(), x.end(), 0.0);
  const int workers = std::max(1, std::min<int>(workers_, static_cast<int>(rays_.size())));
  if (workers == 1) {
    scatter(0, rays_.size(), x);
    return;
  }
  std::vector<std::vector<double>> partial(workers);
  parallel_chunks(rays_.size(), workers, [&](int w, std::size_t begin, std::size_t end) {
    partial[w].assign(x.size(), 0.0);
    scatter(begin, end, partial[w]);
  });
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += part[i];
  }
}

Sinogram forward(const CoefficientGrid& coeffs, const RaySet& rayset, const Generator& gen) {
  if (coeffs.data.size() != static_cast<std::size_t>(coeffs.n()) * coeffs.n()) {
    throw InvalidArgument("coefficient grid data does not match its shape");
  }
  const XrayOperator op(coeffs.grid, rayset, gen);
  Sinogram sino{rayset, std::vector<double>(rayset.size())};
  op.apply(coeffs.data, sino.values);
  return sino;
}

CoefficientGrid adjoint(const Sinogram& sino, const GridSpec& grid, const Generator& gen) {
  if (sino.values.size() != sino.rayset.size()) {
    throw InvalidArgument("sinogram has " + std::to_string(sino.values.size()) + " values for " +
                          std::to_string(sino.rayset.size()) + " rays");
  }
  const XrayOperator op(grid, sino.rayset, gen);
  CoefficientGrid out(grid);
  op.apply_adjoint(sino.values, out.data);
  return out;
}

double adjoint_dot_test(const GridSpec& grid, const RaySet& rayset, const Generator& gen, int trials,
                        std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("adjoint test needs at least one trial");
  const XrayOperator op(grid, rayset, gen);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto dotp = [](std::span<const double> a, std::span<const double> b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(acc);
  };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> c(op.cols()), p(op.rows());
    for (auto& v : c) v = normal(rng);
    for (auto& v : p) v = normal(rng);
    const std::vector<double> hc = op.apply(c);
    const std::vector<double> htp = op.apply_adjoint(p);
    const double lhs = dotp(hc, p);
    const double rhs = dotp(c, htp);
    const double denom = std::sqrt(dotp(hc, hc)) * std::sqrt(dotp(p, p)) +
                         std::sqrt(dotp(c, c)) * std::sqrt(dotp(htp, htp));
    const double rel = denom > 0.0 ? std::abs(lhs - rhs) / denom : std::abs(lhs - rhs);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace boxray
