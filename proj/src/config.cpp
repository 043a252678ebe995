#include "boxray/config.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "boxray/error.hpp"
#include "boxray/io.hpp"

namespace boxray {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw InvalidArgument("bad value for " + key + ": '" + value + "'");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GeometryKind parse_geometry(const std::string& text) {
  if (text == "parallel") return GeometryKind::Parallel;
  if (text == "fanbeam") return GeometryKind::FanBeam;
  if (text == "file") return GeometryKind::File;
  throw InvalidArgument("unknown geometry '" + text + "' (parallel, fanbeam, file)");
}

std::string geometry_name(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Parallel: return "parallel";
    case GeometryKind::FanBeam: return "fanbeam";
    case GeometryKind::File: return "file";
  }
  return "parallel";
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto as_int = [&] { return parse_number<int>(key, value); };
  auto as_double = [&] { return parse_number<double>(key, value); };
  if (key == "generator") {
    parse_generator(value);
    generator = value;
  } else if (key == "grid") grid = as_int();
  else if (key == "geometry") geometry = parse_geometry(value);
  else if (key == "angles") angles = as_int();
  else if (key == "offsets") offsets = as_int();
  else if (key == "fan.sdd") fan_sdd = as_double();
  else if (key == "fan.sod") fan_sod = as_double();
  else if (key == "fan.pitch") fan_pitch = as_double();
  else if (key == "fan.detectors") fan_detectors = as_int();
  else if (key == "fan.angles") fan_angles = as_int();
  else if (key == "fan.cor_shift") fan_cor_shift = as_double();
  else if (key == "rays") rays = value;
  else if (key == "phantom") {
    if (value != "shepp" && value != "disk" && value != "blocks") {
      throw InvalidArgument("unknown phantom '" + value + "' (shepp, disk, blocks)");
    }
    phantom = value;
  } else if (key == "disk.radius") disk_radius = as_double();
  else if (key == "disk.density") disk_density = as_double();
  else if (key == "iterations") iterations = as_int();
  else if (key == "lambda") lambda = as_double();
  else if (key == "tol") tol = as_double();
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "noise.variance") noise_variance = as_double();
  else if (key == "resample") resample = as_int();
  else if (key == "input") input = value;
  else if (key == "out") out = value;
  else if (key == "benchmark.sizes") {
    std::vector<int> sizes;
    std::istringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) sizes.push_back(parse_number<int>(key, trim(tok)));
    if (sizes.empty()) throw InvalidArgument("benchmark.sizes is empty");
    benchmark_sizes = sizes;
  } else if (key == "benchmark.repeats") benchmark_repeats = as_int();
  else if (key == "benchmark.warmup") benchmark_warmup = as_int();
  else if (key == "profile.angles") profile_angles = as_int();
  else if (key == "profile.samples") profile_samples = as_int();
  else if (key == "calibrate.min") calibrate_min = as_double();
  else if (key == "calibrate.max") calibrate_max = as_double();
  else if (key == "calibrate.step") calibrate_step = as_double();
  else if (key == "calibrate.iterations") calibrate_iterations = as_int();
  else if (key == "calibrate.generator") {
    parse_generator(value);
    calibrate_generator = value;
  } else throw InvalidArgument("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  if (grid < 1) throw InvalidArgument("grid must be positive");
  if (angles < 1 || offsets < 1) throw InvalidArgument("angles and offsets must be positive");
  if (geometry == GeometryKind::File && rays.empty()) throw InvalidArgument("file geometry needs rays=<path>");
  if (geometry == GeometryKind::FanBeam) fan_config().validate();
  if (!(disk_radius > 0.0)) throw InvalidArgument("disk.radius must be positive");
  if (!(noise_variance >= 0.0)) throw InvalidArgument("noise.variance must be non-negative");
  if (resample < 1) throw InvalidArgument("resample must be at least 1");
  if (benchmark_repeats < 5) throw InvalidArgument("benchmark.repeats must be at least 5");
  if (benchmark_warmup < 0) throw InvalidArgument("benchmark.warmup must be non-negative");
  for (int s : benchmark_sizes) {
    if (s < 1) throw InvalidArgument("benchmark sizes must be positive");
  }
  if (profile_angles < 1 || profile_samples < 2) throw InvalidArgument("profile needs >= 1 angle and >= 2 samples");
  if (calibrate_iterations < 1) throw InvalidArgument("calibrate.iterations must be at least 1");
  solver().validate();
}

FanBeamConfig RunConfig::fan_config() const {
  FanBeamConfig c;
  c.source_to_detector = fan_sdd;
  c.source_to_object = fan_sod;
  c.detector_pitch = fan_pitch;
  c.n_detectors = fan_detectors;
  c.cor_shift = fan_cor_shift;
  if (fan_angles < 1) throw InvalidArgument("fan.angles must be positive");
  for (int a = 0; a < fan_angles; ++a) c.angles.push_back(2.0 * std::numbers::pi * a / fan_angles);
  return c;
}

RaySet RunConfig::make_rayset() const {
  switch (geometry) {
    case GeometryKind::Parallel: return parallel_rayset(angles, offsets, grid_spec());
    case GeometryKind::FanBeam: return fanbeam_rayset(fan_config(), grid_spec());
    case GeometryKind::File: {
      RaySet set = read_rays(rays);
      if (set.size() == 0) throw InvalidArgument("ray list '" + rays + "' is empty");
      return set;
    }
  }
  throw InvalidArgument("unknown geometry");
}

SolverConfig RunConfig::solver() const { return SolverConfig{iterations, lambda, tol, seed}; }

std::string RunConfig::dump() const {
  std::ostringstream o;
  o << "generator=" << generator << "\ngrid=" << grid << "\ngeometry=" << geometry_name(geometry)
    << "\nangles=" << angles << "\noffsets=" << offsets << "\nfan.sdd=" << fmt(fan_sdd)
    << "\nfan.sod=" << fmt(fan_sod) << "\nfan.pitch=" << fmt(fan_pitch) << "\nfan.detectors=" << fan_detectors
    << "\nfan.angles=" << fan_angles << "\nfan.cor_shift=" << fmt(fan_cor_shift);
  if (!rays.empty()) o << "\nrays=" << rays;
  o << "\nphantom=" << phantom << "\ndisk.radius=" << fmt(disk_radius) << "\ndisk.density=" << fmt(disk_density)
    << "\niterations=" << iterations << "\nlambda=" << fmt(lambda) << "\ntol=" << fmt(tol) << "\nseed=" << seed
    << "\nnoise.variance=" << fmt(noise_variance) << "\nresample=" << resample;
  if (!input.empty()) o << "\ninput=" << input;
  if (!out.empty()) o << "\nout=" << out;
  o << "\nbenchmark.sizes=";
  for (std::size_t i = 0; i < benchmark_sizes.size(); ++i) o << (i ? "," : "") << benchmark_sizes[i];
  o << "\nbenchmark.repeats=" << benchmark_repeats << "\nbenchmark.warmup=" << benchmark_warmup
    << "\nprofile.angles=" << profile_angles << "\nprofile.samples=" << profile_samples
    << "\ncalibrate.min=" << fmt(calibrate_min) << "\ncalibrate.max=" << fmt(calibrate_max)
    << "\ncalibrate.step=" << fmt(calibrate_step) << "\ncalibrate.iterations=" << calibrate_iterations
    << "\ncalibrate.generator=" << calibrate_generator << '\n';
  return o.str();
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InvalidArgument("line " + std::to_string(lineno) + ": expected key=value");
    try {
      cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_text(path)); }

}  // namespace boxray
