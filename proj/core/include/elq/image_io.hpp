#pragma once

#include <string>

#include "elq/raster.hpp"

namespace elq {

// PNG (any color type, via libpng) or uncompressed 24/32-bit BMP, sniffed by
// signature.  Everything lands as 8-bit RGB.
Raster<Rgb> read_image(const std::string& path);

// Same inputs reduced to luma, for B-mode rasters stored as image files.
Raster<uint8_t> read_image_gray(const std::string& path);

void write_png(const std::string& path, const Raster<Rgb>& image);

}  // namespace elq
