#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "boxray/image.hpp"
#include "boxray/xray_ops.hpp"

namespace boxray {

/// "SINO1 M=<M>" then M lines "theta y value" at 17 significant digits.
std::string format_sinogram(const Sinogram& sino);
Sinogram parse_sinogram(const std::string& text);
void write_sinogram(const std::filesystem::path& path, const Sinogram& sino);
Sinogram read_sinogram(const std::filesystem::path& path);

/// "IMGF64 <w> <h>\n" followed by little-endian doubles, row-major.
void write_image_raw(const std::filesystem::path& path, const Image& img);
Image read_image_raw(const std::filesystem::path& path);

/// 16-bit binary PGM, linearly mapped from [min, max] to [0, 65535].
void write_pgm16(const std::filesystem::path& path, const Image& img);

/// One ray per non-empty line: "theta y". Lines starting with '#' are skipped.
RaySet parse_rays(const std::string& text);
RaySet read_rays(const std::filesystem::path& path);

Image to_image(const CoefficientGrid& coeffs);
CoefficientGrid to_coefficients(const Image& img, const GridSpec& grid);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace boxray
