#pragma once

#include <string>

#include "raster.hpp"

namespace leafscope {

// Decodes a PNG or JPEG file; the format is sniffed from the file header.
RasterImage load_image(const std::string& path);

void save_png(const RasterImage& img, const std::string& path);

// Masks are written as 1-bit grayscale PNG. Loading also accepts 8-bit
// grayscale images whose values are only 0 or 255.
void save_mask_png(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask_png(const std::string& path);

}  // namespace leafscope
