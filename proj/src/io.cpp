#include "boxray/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <algorithm>

#include "boxray/error.hpp"

namespace boxray {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw IoError(std::string("malformed ") + what + ": '" + tok + "'");
  }
  return v;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = __builtin_bswap64(v);
  }
  return v;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_sinogram(const Sinogram& sino) {
  if (sino.values.size() != sino.rayset.size()) throw InvalidArgument("sinogram values do not match rays");
  std::string out = "SINO1 M=" + std::to_string(sino.values.size()) + "\n";
  for (std::size_t m = 0; m < sino.values.size(); ++m) {
    const Ray& r = sino.rayset.rays[m];
    out += fmt17(r.theta()) + ' ' + fmt17(r.offset()) + ' ' + fmt17(sino.values[m]) + '\n';
  }
  return out;
}

Sinogram parse_sinogram(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("SINO1 M=", 0) != 0) throw IoError("missing SINO1 header");
  long count = 0;
  try {
    count = std::stol(line.substr(8));
  } catch (const std::exception&) {
    throw IoError("bad SINO1 header: " + line);
  }
  if (count < 0) throw IoError("negative ray count in SINO1 header");
  Sinogram sino;
  sino.rayset.metadata = "file";
  sino.rayset.rays.reserve(count);
  sino.values.reserve(count);
  for (long m = 0; m < count; ++m) {
    if (!std::getline(in, line)) throw IoError("SINO1 file truncated at ray " + std::to_string(m));
    std::istringstream ls(line);
    std::string a, b, c, extra;
    if (!(ls >> a >> b >> c) || (ls >> extra)) throw IoError("malformed SINO1 line " + std::to_string(m + 2));
    try {
      sino.rayset.rays.emplace_back(parse_double(a, "theta"), parse_double(b, "offset"));
    } catch (const InvalidArgument& e) {
      throw IoError("SINO1 line " + std::to_string(m + 2) + ": " + e.what());
    }
    sino.values.push_back(parse_double(c, "value"));
  }
  while (std::getline(in, line)) {
    if (!line.empty()) throw IoError("trailing data after SINO1 records");
  }
  return sino;
}

void write_sinogram(const std::filesystem::path& path, const Sinogram& sino) {
  write_text(path, format_sinogram(sino));
}

Sinogram read_sinogram(const std::filesystem::path& path) { return parse_sinogram(read_text(path)); }

void write_image_raw(const std::filesystem::path& path, const Image& img) {
  std::string out = "IMGF64 " + std::to_string(img.width) + ' ' + std::to_string(img.height) + '\n';
  const std::size_t head = out.size();
  out.resize(head + img.pixels.size() * 8);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(img.pixels[i]));
    std::memcpy(out.data() + head + 8 * i, &bits, 8);
  }
  write_text(path, out);
}

Image read_image_raw(const std::filesystem::path& path) {
  const std::string data = read_text(path);
  const auto nl = data.find('\n');
  if (nl == std::string::npos || data.rfind("IMGF64 ", 0) != 0) throw IoError("missing IMGF64 header");
  std::istringstream hs(data.substr(7, nl - 7));
  long w = -1, h = -1;
  if (!(hs >> w >> h) || w < 0 || h < 0) throw IoError("bad IMGF64 header");
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (data.size() != nl + 1 + 8 * count) throw IoError("IMGF64 payload size mismatch in " + path.string());
  Image img(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, data.data() + nl + 1 + 8 * i, 8);
    img.pixels[i] = std::bit_cast<double>(to_le(bits));
  }
  return img;
}

void write_pgm16(const std::filesystem::path& path, const Image& img) {
  std::string out = "P5\n" + std::to_string(img.width) + ' ' + std::to_string(img.height) + "\n65535\n";
  double lo = 0.0, hi = 0.0;
  if (!img.pixels.empty()) {
    const auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    lo = *mn;
    hi = *mx;
  }
  const double span = hi > lo ? hi - lo : 1.0;
  for (double v : img.pixels) {
    const double t = std::clamp((v - lo) / span, 0.0, 1.0);
    const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    out += static_cast<char>(q >> 8);
    out += static_cast<char>(q & 0xff);
  }
  write_text(path, out);
}

RaySet parse_rays(const std::string& text) {
  RaySet set;
  set.metadata = "file";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b) || (ls >> extra)) throw IoError("malformed ray on line " + std::to_string(lineno));
    try {
      set.rays.emplace_back(parse_double(a, "theta"), parse_double(b, "offset"));
    } catch (const InvalidArgument& e) {
      throw IoError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return set;
}

RaySet read_rays(const std::filesystem::path& path) { return parse_rays(read_text(path)); }

Image to_image(const CoefficientGrid& coeffs) {
  Image img(coeffs.n(), coeffs.n());
  img.pixels = coeffs.data;
  return img;
}

CoefficientGrid to_coefficients(const Image& img, const GridSpec& grid) {
  if (img.width != grid.n || img.height != grid.n) {
    throw InvalidArgument("image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                          ", grid expects " + std::to_string(grid.n));
  }
  CoefficientGrid c(grid);
  c.data = img.pixels;
  return c;
}

}  // namespace boxray
