#pragma once

#include <cstddef>
#include <vector>

#include "boxray/geometry.hpp"

namespace boxray {

/// Expansion coefficients c_k on a GridSpec, row-major with q (the vertical
/// index) major: index = q * n + p.
struct CoefficientGrid {
  GridSpec grid;
  std::vector<double> data;

  CoefficientGrid() = default;
  explicit CoefficientGrid(const GridSpec& g, double fill = 0.0)
      : grid(g), data(static_cast<std::size_t>(g.n) * g.n, fill) {}

  int n() const { return grid.n; }
  std::size_t index(int p, int q) const { return static_cast<std::size_t>(q) * grid.n + p; }
  double& at(int p, int q) { return data[index(p, q)]; }
  double at(int p, int q) const { return data[index(p, q)]; }
  bool contains(int p, int q) const { return p >= 0 && q >= 0 && p < grid.n && q < grid.n; }
};

/// Dense square raster (resampled images, phantoms). Row-major, y major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

}  // namespace boxray
