#pragma once

#include <string>
#include <vector>

#include "framelet/image.hpp"

namespace framelet {

// Reads an 8-bit PNG or PGM (P2/P5) raster. Color inputs are converted
// to luminance with ITU-R 601 weights (0.299, 0.587, 0.114).
Image load_image(const std::string& path);

// 8-bit grayscale writers; pixels are rounded and clamped to [0, 255].
// The PGM writer embeds `comment` as a header comment line.
void save_png(const Image& img, const std::string& path);
void save_pgm(const Image& img, const std::string& path, const std::string& comment = {});

// Dispatch on extension (.png / .pgm, case-insensitive).
void save_image(const Image& img, const std::string& path, const std::string& comment = {});

// Sorted list of raster files (*.png, *.pgm) directly inside a directory.
std::vector<std::string> list_rasters(const std::string& dir);

}  // namespace framelet
