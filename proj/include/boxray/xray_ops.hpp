#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "boxray/geometry.hpp"
#include "boxray/image.hpp"
#include "boxray/profiles.hpp"

namespace boxray {

struct Sinogram {
  RaySet rayset;
  std::vector<double> values;  ///< values[m] belongs to rayset.rays[m]
};

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual void apply_adjoint(std::span<const double> y, std::span<double> x) const = 0;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_adjoint(std::span<const double> y) const;
};

/// Matrix-free H_phi: (H c)_m = sum_k c_k phi_{theta_m}(y_m - <k, theta_perp>).
class XrayOperator final : public LinearOperator {
 public:
  XrayOperator(GridSpec grid, RaySet rays, Generator gen, int workers = 0);

  std::size_t rows() const override { return rays_.size(); }
  std::size_t cols() const override { return static_cast<std::size_t>(grid_.n) * grid_.n; }
  void apply(std::span<const double> x, std::span<double> y) const override;
  /// Deterministic: per-worker accumulators over contiguous ray chunks,
  /// merged in chunk order.
  void apply_adjoint(std::span<const double> y, std::span<double> x) const override;
  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;

  const GridSpec& grid() const { return grid_; }
  const RaySet& rays() const { return rays_; }
  const Generator& generator() const { return gen_; }
  int workers() const { return workers_; }

 private:
  GridSpec grid_;
  RaySet rays_;
  Generator gen_;
  int neighbors_;
  int workers_;
};

Sinogram forward(const CoefficientGrid& coeffs, const RaySet& rayset, const Generator& gen);
CoefficientGrid adjoint(const Sinogram& sino, const GridSpec& grid, const Generator& gen);

/// max over trials of |<Hc, p> - <c, H^T p>| / (|Hc||p| + |c||H^T p|) for
/// seeded Gaussian c and p.
double adjoint_dot_test(const GridSpec& grid, const RaySet& rayset, const Generator& gen, int trials,
                        std::uint64_t seed);

}  // namespace boxray
