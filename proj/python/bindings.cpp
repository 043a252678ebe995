#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "boxray/error.hpp"
#include "boxray/recon.hpp"
#include "boxray/xray_ops.hpp"

namespace py = pybind11;
using namespace boxray;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

RaySet make_rays(const Array& thetas, const Array& offsets) {
  if (thetas.ndim() != 1 || offsets.ndim() != 1 || thetas.size() != offsets.size()) {
    throw InvalidArgument("thetas and offsets must be 1-D arrays of equal length");
  }
  RaySet set;
  set.metadata = "python";
  auto t = thetas.unchecked<1>();
  auto o = offsets.unchecked<1>();
  set.rays.reserve(t.shape(0));
  for (py::ssize_t i = 0; i < t.shape(0); ++i) set.rays.emplace_back(t(i), o(i));
  return set;
}

py::tuple split_rays(const RaySet& set) {
  Array t(static_cast<py::ssize_t>(set.size()));
  Array o(static_cast<py::ssize_t>(set.size()));
  auto tm = t.mutable_unchecked<1>();
  auto om = o.mutable_unchecked<1>();
  for (std::size_t i = 0; i < set.size(); ++i) {
    tm(i) = set.rays[i].theta();
    om(i) = set.rays[i].offset();
  }
  return py::make_tuple(t, o);
}

CoefficientGrid to_grid(const Array& coeffs) {
  if (coeffs.ndim() != 2 || coeffs.shape(0) != coeffs.shape(1)) {
    throw InvalidArgument("coefficients must be a square 2-D array");
  }
  CoefficientGrid c(GridSpec::centered(static_cast<int>(coeffs.shape(0))));
  std::memcpy(c.data.data(), coeffs.data(), c.data.size() * sizeof(double));
  return c;
}

Array square(const std::vector<double>& data, int n) {
  Array out({n, n});
  std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(double));
  return out;
}

Image to_image(const Array& a) {
  if (a.ndim() != 2) throw InvalidArgument("images must be 2-D arrays");
  Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::memcpy(img.pixels.data(), a.data(), img.pixels.size() * sizeof(double));
  return img;
}

std::vector<double> values_of(const Array& a) {
  if (a.ndim() != 1) throw InvalidArgument("sinogram values must be a 1-D array");
  return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix-free x-ray operators for box-spline and B-spline bases on centred n x n grids.";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("generator_names", [] { return std::vector<std::string>{"pixel", "box3", "box4", "bspline0", "bspline1", "bspline2", "bspline3"}; });

  m.def(
      "parallel_rays",
      [](int n_angles, int n_offsets, int n) { return split_rays(parallel_rayset(n_angles, n_offsets, GridSpec::centered(n))); },
      py::arg("n_angles"), py::arg("n_offsets"), py::arg("n"), "Angle-major parallel geometry; returns (thetas, offsets).");

  m.def(
      "fanbeam_rays",
      [](int n, int n_detectors, const std::vector<double>& angles, double sdd, double sod, double pitch, double cor_shift) {
        FanBeamConfig cfg{sdd, sod, pitch, n_detectors, angles, cor_shift};
        return split_rays(fanbeam_rayset(cfg, GridSpec::centered(n)));
      },
      py::arg("n"), py::arg("n_detectors"), py::arg("angles"), py::arg("source_to_detector"),
      py::arg("source_to_object"), py::arg("detector_pitch"), py::arg("cor_shift") = 0.0);

  m.def(
      "forward",
      [](const Array& coeffs, const Array& thetas, const Array& offsets, const std::string& gen) {
        const CoefficientGrid c = to_grid(coeffs);
        const RaySet rays = make_rays(thetas, offsets);
        std::vector<double> out;
        {
          py::gil_scoped_release release;
          out = forward(c, rays, parse_generator(gen)).values;
        }
        return Array(static_cast<py::ssize_t>(out.size()), out.data());
      },
      py::arg("coeffs"), py::arg("thetas"), py::arg("offsets"), py::arg("generator") = "pixel");

  m.def(
      "adjoint",
      [](const Array& values, const Array& thetas, const Array& offsets, int n, const std::string& gen) {
        Sinogram s{make_rays(thetas, offsets), values_of(values)};
        CoefficientGrid out;
        {
          py::gil_scoped_release release;
          out = adjoint(s, GridSpec::centered(n), parse_generator(gen));
        }
        return square(out.data, n);
      },
      py::arg("values"), py::arg("thetas"), py::arg("offsets"), py::arg("n"), py::arg("generator") = "pixel");

  m.def(
      "adjoint_dot_test",
      [](int n, const Array& thetas, const Array& offsets, const std::string& gen, int trials, std::uint64_t seed) {
        const RaySet rays = make_rays(thetas, offsets);
        py::gil_scoped_release release;
        return adjoint_dot_test(GridSpec::centered(n), rays, parse_generator(gen), trials, seed);
      },
      py::arg("n"), py::arg("thetas"), py::arg("offsets"), py::arg("generator") = "pixel", py::arg("trials") = 3,
      py::arg("seed") = 0);

  m.def(
      "profile",
      [](const std::string& gen, double theta, const Array& y) {
        const ProjectedProfile prof = project_generator(parse_generator(gen), theta);
        Array out(y.request().shape);
        const double* in = y.data();
        double* o = out.mutable_data();
        for (py::ssize_t i = 0; i < y.size(); ++i) o[i] = eval_profile(prof, in[i]);
        return out;
      },
      py::arg("generator"), py::arg("theta"), py::arg("y"), "Projected profile phi_theta(y).");

  m.def(
      "cg_solve",
      [](const Array& values, const Array& thetas, const Array& offsets, int n, const std::string& gen,
         int iterations, double lam, double tol) {
        Sinogram s{make_rays(thetas, offsets), values_of(values)};
        SolverConfig cfg;
        cfg.iterations = iterations;
        cfg.lambda = lam;
        cfg.tol = tol;
        CoefficientGrid out;
        {
          py::gil_scoped_release release;
          out = cg_solve(s.rayset, parse_generator(gen), s, GridSpec::centered(n), cfg);
        }
        return square(out.data, n);
      },
      py::arg("values"), py::arg("thetas"), py::arg("offsets"), py::arg("n"), py::arg("generator") = "pixel",
      py::arg("iterations") = 30, py::arg("lam") = 0.0, py::arg("tol") = 0.0);

  m.def(
      "resample",
      [](const Array& coeffs, const std::string& gen, int factor) {
        const Image img = resample(to_grid(coeffs), parse_generator(gen), factor);
        return square(img.pixels, img.width);
      },
      py::arg("coeffs"), py::arg("generator"), py::arg("factor"));

  m.def(
      "phantom_sinogram",
      [](const Array& thetas, const Array& offsets, int n) {
        const Sinogram s = ellipse_sinogram(default_phantom(GridSpec::centered(n)), make_rays(thetas, offsets));
        return Array(static_cast<py::ssize_t>(s.values.size()), s.values.data());
      },
      py::arg("thetas"), py::arg("offsets"), py::arg("n"), "Analytic sinogram of the default Shepp-Logan phantom.");

  m.def(
      "phantom_raster",
      [](int n, int factor) {
        const GridSpec grid = GridSpec::centered(n);
        const Image img = phantom_raster(default_phantom(grid), grid, factor);
        return square(img.pixels, img.width);
      },
      py::arg("n"), py::arg("factor") = 1);

  m.def("psnr", [](const Array& x, const Array& ref) { return psnr(to_image(x), to_image(ref)); }, py::arg("x"),
        py::arg("ref"));
  m.def("ssim", [](const Array& x, const Array& ref) { return ssim(to_image(x), to_image(ref)); }, py::arg("x"),
        py::arg("ref"));
}
