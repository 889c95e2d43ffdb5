#pragma once

#include <string>

#include "splatcolor/image.hpp"

namespace splatcolor {

// PNG readers accept 8- and 16-bit files; values map to [0,1].
ImageRGB load_image(const std::string& path);
ImageGray load_gray(const std::string& path);
// Single-channel PNG; nonzero = foreground.
ImageMask load_mask(const std::string& path);

// Values are clamped to [0,1] and quantized. bits must be 8 or 16.
void save_image(const ImageRGB& img, const std::string& path, int bits = 8);
void save_gray(const ImageGray& img, const std::string& path, int bits = 8);
void save_mask(const ImageMask& mask, const std::string& path);

// Depth as raw little-endian float32 (exact) .........................
void save_depth_raw(const ImageGray& depth, const std::string& path);
ImageGray load_depth_raw(const std::string& path, int width, int height);

// ... or as a 16-bit PNG plus a JSON sidecar recording the min/max scaling.
void save_depth_png(const ImageGray& depth, const std::string& png_path,
                    const std::string& sidecar_path);
ImageGray load_depth_png(const std::string& png_path, const std::string& sidecar_path);

}  // namespace splatcolor
