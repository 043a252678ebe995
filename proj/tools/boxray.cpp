// boxray: command-line front end for projection, reconstruction and
// calibration experiments.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxray/config.hpp"
#include "boxray/error.hpp"
#include "boxray/io.hpp"
#include "boxray/recon.hpp"
#include "boxray/xray_ops.hpp"

using namespace boxray;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

struct Flags {
  std::string config;
  std::vector<std::string> generator;
  int grid = 0;
  std::string geometry;
  std::string rays;
  long long seed = -1;
  std::string out;
  std::string input;
  std::vector<std::string> overrides;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key=value run configuration");
  cmd->add_option("--generator", f.generator, "pixel | box3 | box4 | bspline <n>")->expected(1, 2);
  cmd->add_option("--grid", f.grid, "grid side n");
  cmd->add_option("--geometry", f.geometry, "parallel | fanbeam | file");
  cmd->add_option("--rays", f.rays, "ray list for file geometry (lines \"theta y\")");
  cmd->add_option("--seed", f.seed, "seed for noise and random draws");
  cmd->add_option("--out", f.out, "output path");
  cmd->add_option("--input", f.input, "input file");
  cmd->add_option("--set", f.overrides, "extra key=value config entries");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  for (const std::string& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.generator.empty()) {
    std::string g = f.generator[0];
    for (std::size_t i = 1; i < f.generator.size(); ++i) g += " " + f.generator[i];
    cfg.set("generator", g);
  }
  if (f.grid != 0) cfg.grid = f.grid;
  if (!f.geometry.empty()) cfg.set("geometry", f.geometry);
  if (!f.rays.empty()) {
    cfg.rays = f.rays;
    if (f.geometry.empty()) cfg.geometry = GeometryKind::File;
  }
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.input.empty()) cfg.input = f.input;
  cfg.validate();
  return cfg;
}

std::string require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw InvalidArgument("--out is required");
  return cfg.out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Phantom make_phantom(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid_spec();
  if (cfg.phantom == "disk") return {disk_phantom(grid.center(), cfg.disk_radius, cfg.disk_density), {}};
  if (cfg.phantom == "blocks") return block_phantom(grid);
  return {default_phantom(grid), {}};
}

Sinogram synthesize(const RunConfig& cfg, const RaySet& rays) {
  const Sinogram clean = phantom_sinogram(make_phantom(cfg), rays);
  return add_noise(clean, NoiseSpec{cfg.noise_variance, cfg.seed});
}

int cmd_phantom(const RunConfig& cfg) {
  const std::string out = require_out(cfg);
  const RaySet rays = cfg.make_rayset();
  const Sinogram sino = synthesize(cfg, rays);
  const Image img = phantom_raster(make_phantom(cfg), cfg.grid_spec(), cfg.resample);
  write_sinogram(out + ".sino", sino);
  write_image_raw(out + ".img", img);
  write_pgm16(out + ".pgm", img);
  std::cout << "phantom=" << cfg.phantom << " M=" << sino.values.size() << " image=" << img.width << "x"
            << img.height << "\n";
  return kOk;
}

int cmd_project(const RunConfig& cfg) {
  const std::string out = require_out(cfg);
  if (cfg.input.empty()) throw InvalidArgument("project needs --input <IMGF64 coefficient grid>");
  const GridSpec grid = cfg.grid_spec();
  const CoefficientGrid coeffs = to_coefficients(read_image_raw(cfg.input), grid);
  const Sinogram sino = forward(coeffs, cfg.make_rayset(), cfg.make_generator());
  write_sinogram(out, sino);
  std::cout << "generator=" << cfg.make_generator().name() << " N=" << grid.n << " M=" << sino.values.size()
            << "\n";
  return kOk;
}

int cmd_backproject(const RunConfig& cfg) {
  const std::string out = require_out(cfg);
  if (cfg.input.empty()) throw InvalidArgument("backproject needs --input <SINO1 file>");
  const Sinogram sino = read_sinogram(cfg.input);
  const GridSpec grid = cfg.grid_spec();
  const CoefficientGrid acc = adjoint(sino, grid, cfg.make_generator());
  write_image_raw(out, to_image(acc));
  std::cout << "generator=" << cfg.make_generator().name() << " N=" << grid.n << " M=" << sino.values.size()
            << "\n";
  return kOk;
}

int cmd_adjoint_check(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid_spec();
  const Generator gen = cfg.make_generator();
  const RaySet rays = cfg.make_rayset();
  const double d = adjoint_dot_test(grid, rays, gen, 3, cfg.seed);
  const bool ok = d <= 1e-10;
  std::cout << "generator=" << gen.name() << " geometry=" << geometry_name(cfg.geometry) << " N=" << grid.n
            << " M=" << rays.size() << " max_rel_discrepancy=" << g17(d) << " " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kNumerical;
}

int cmd_reconstruct(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid_spec();
  const Generator gen = cfg.make_generator();
  Sinogram sino;
  if (!cfg.input.empty()) {
    sino = read_sinogram(cfg.input);
  } else {
    sino = synthesize(cfg, cfg.make_rayset());
  }
  const CoefficientGrid c = cg_solve(sino.rayset, gen, sino, grid, cfg.solver());
  const Image rec = resample(c, gen, cfg.resample);
  const Image truth = phantom_raster(make_phantom(cfg), grid, cfg.resample);
  const double p = psnr(rec, truth);
  const double s = ssim(rec, truth);
  std::ostringstream csv;
  csv << "generator,n_down,psnr,ssim\n" << gen.name() << ',' << grid.n << ',' << g17(p) << ',' << g17(s) << '\n';
  if (!cfg.out.empty()) {
    write_image_raw(cfg.out, rec);
    write_pgm16(cfg.out + ".pgm", rec);
    write_text(cfg.out + ".csv", csv.str());
  }
  std::cout << csv.str();
  return kOk;
}

int cmd_profile_dump(const RunConfig& cfg) {
  const Generator gen = cfg.make_generator();
  std::ostringstream csv;
  csv << "theta,y,value\n";
  for (int a = 0; a < cfg.profile_angles; ++a) {
    const double theta = -std::numbers::pi / 4.0 + (std::numbers::pi / 2.0) * a / cfg.profile_angles;
    const ProjectedProfile prof = project_generator(gen, theta);
    if (prof.is_dirac()) continue;
    const double half = prof.center_shift;
    // Uniform samples plus every knot.
    std::vector<double> ys;
    for (int i = 0; i < cfg.profile_samples; ++i) ys.push_back(-half + 2.0 * half * i / (cfg.profile_samples - 1));
    for (double k : prof.knots) ys.push_back(k - half);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end(), [](double u, double v) { return std::abs(u - v) < 1e-13; }),
             ys.end());
    const double eps = 1e-9 * std::max(1.0, half);
    for (double y : ys) {
      const double left = eval_profile(prof, y - eps);
      const double right = eval_profile(prof, y + eps);
      const double v = eval_profile(prof, y);
      // Degree-0 jumps get both one-sided values.
      if (prof.degree == 0 && std::abs(left - right) > 1e-6) {
        csv << g17(theta) << ',' << g17(y) << ',' << g17(left) << '\n';
        csv << g17(theta) << ',' << g17(y) << ',' << g17(right) << '\n';
      } else {
        csv << g17(theta) << ',' << g17(y) << ',' << g17(v) << '\n';
      }
    }
  }
  if (!cfg.out.empty()) {
    write_text(cfg.out, csv.str());
  } else {
    std::cout << csv.str();
  }
  return kOk;
}

int cmd_benchmark(const RunConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  std::ostringstream csv;
  csv << "op,generator,N,ms\n";
  const std::vector<Generator> gens = {Generator::pixel(), Generator::box_spline3(), Generator::box_spline4()};
  auto median_ms = [&](auto&& f) {
    for (int i = 0; i < cfg.benchmark_warmup; ++i) f();
    std::vector<double> ms;
    for (int i = 0; i < cfg.benchmark_repeats; ++i) {
      const auto t0 = Clock::now();
      f();
      ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    return ms[ms.size() / 2];
  };
  for (int n : cfg.benchmark_sizes) {
    const GridSpec grid = GridSpec::centered(n);
    const RaySet par = parallel_rayset(2 * n, n, grid);
    RaySet rnd;
    rnd.metadata = "random";
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> off(-0.5 * n, 0.5 * n);
    for (std::size_t i = 0; i < par.size(); ++i) rnd.rays.emplace_back(angle(rng), off(rng));
    std::vector<double> c(static_cast<std::size_t>(n) * n, 1.0);
    for (const Generator& gen : gens) {
      const XrayOperator op(grid, par, gen);
      const XrayOperator op_rnd(grid, rnd, gen);
      std::vector<double> y(op.rows()), x(op.cols());
      const double t_fwd = median_ms([&] { op.apply(c, y); });
      const double t_adj = median_ms([&] { op.apply_adjoint(y, x); });
      const double t_rnd = median_ms([&] { op_rnd.apply(c, y); });
      csv << "forward," << gen.name() << ',' << n << ',' << g17(t_fwd) << '\n';
      csv << "adjoint," << gen.name() << ',' << n << ',' << g17(t_adj) << '\n';
      csv << "forward_random," << gen.name() << ',' << n << ',' << g17(t_rnd) << '\n';
    }
  }
  if (!cfg.out.empty()) write_text(cfg.out, csv.str());
  std::cout << csv.str();
  return kOk;
}

int cmd_calibrate(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid_spec();
  FanBeamConfig fan = cfg.fan_config();
  Sinogram sino;
  if (!cfg.input.empty()) {
    sino = read_sinogram(cfg.input);
  } else {
    // Synthetic data acquired with the configured shift.
    sino = synthesize(cfg, fanbeam_rayset(fan, grid));
  }
  fan.cor_shift = 0.0;
  SolverConfig solver = cfg.solver();
  solver.iterations = cfg.calibrate_iterations;
  const CorSearch search{cfg.calibrate_min, cfg.calibrate_max, cfg.calibrate_step};
  const CorResult res = calibrate_cor(sino, fan, grid, parse_generator(cfg.calibrate_generator), search, solver);
  std::ostringstream report;
  report << "shift,residual\n";
  for (const CorCandidate& c : res.scores) report << g17(c.shift) << ',' << g17(c.residual) << '\n';
  report << "best_shift=" << g17(res.best_shift) << '\n';
  if (!cfg.out.empty()) write_text(cfg.out, report.str());
  std::cout << report.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boxray: x-ray projection with box-spline bases"};
  app.require_subcommand(1);
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  static const Entry entries[] = {
      {"phantom", "write a phantom image and its analytic sinogram", cmd_phantom},
      {"project", "forward-project a coefficient grid", cmd_project},
      {"backproject", "apply the adjoint to a sinogram", cmd_backproject},
      {"adjoint-check", "dot-product test of forward against adjoint", cmd_adjoint_check},
      {"reconstruct", "CG reconstruction with PSNR/SSIM report", cmd_reconstruct},
      {"profile-dump", "CSV of projected profiles for angles in [-pi/4, pi/4)", cmd_profile_dump},
      {"benchmark", "median forward/adjoint wall times", cmd_benchmark},
      {"calibrate", "grid search for the centre-of-rotation shift", cmd_calibrate},
  };
  std::vector<Flags> flags(std::size(entries));
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    CLI::App* cmd = app.add_subcommand(entries[i].name, entries[i].help);
    add_flags(cmd, flags[i]);
    cmds.push_back(cmd);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      if (cmds[i]->parsed()) return entries[i].run(resolve(flags[i]));
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
