#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxray/geometry.hpp"
#include "boxray/profiles.hpp"
#include "boxray/recon.hpp"

namespace boxray {

enum class GeometryKind { Parallel, FanBeam, File };

GeometryKind parse_geometry(const std::string& text);
std::string geometry_name(GeometryKind kind);

/// Settings shared by all CLI commands. Loaded from key=value text; unknown
/// keys are rejected.
struct RunConfig {
  std::string generator = "pixel";
  int grid = 64;
  GeometryKind geometry = GeometryKind::Parallel;

  int angles = 128;
  int offsets = 64;

  double fan_sdd = 1000.0;
  double fan_sod = 500.0;
  double fan_pitch = 2.0;
  int fan_detectors = 64;
  int fan_angles = 90;
  double fan_cor_shift = 0.0;

  std::string rays;

  std::string phantom = "shepp";
  double disk_radius = 16.0;
  double disk_density = 1.0;

  int iterations = 30;
  double lambda = 0.0;
  double tol = 0.0;
  std::uint64_t seed = 0;

  double noise_variance = 0.0;

  int resample = 4;

  std::string input;
  std::string out;

  std::vector<int> benchmark_sizes{64, 128, 256};
  int benchmark_repeats = 5;
  int benchmark_warmup = 1;

  int profile_angles = 8;
  int profile_samples = 2001;

  double calibrate_min = -1.0;
  double calibrate_max = 1.0;
  double calibrate_step = 0.05;
  int calibrate_iterations = 10;
  std::string calibrate_generator = "pixel";

  /// Sets one key; throws InvalidArgument on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  GridSpec grid_spec() const { return GridSpec::centered(grid); }
  Generator make_generator() const { return parse_generator(generator); }
  FanBeamConfig fan_config() const;
  /// Builds the configured ray set; `file` geometry reads `rays`.
  RaySet make_rayset() const;
  SolverConfig solver() const;

  /// Canonical key=value listing, loadable by parse_run_config.
  std::string dump() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace boxray
