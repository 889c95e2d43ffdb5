#pragma once

#include "splatcolor/image.hpp"

namespace splatcolor {

// PSNR in dB over the three channels, peak 1.0, capped at 100 (identical
// images would otherwise be infinite). With a mask, only marked pixels enter
// the mean; an all-false mask raises InvalidInputError, as do size mismatches.
double psnr(const ImageRGB& a, const ImageRGB& b, const ImageMask* mask = nullptr);

// Mean SSIM on luminance, 11x11 Gaussian window (sigma 1.5), K1=0.01 K2=0.03,
// dynamic range 1. Windows must fit inside the image (smaller images raise
// InvalidInputError); with a mask, a window counts iff its center pixel is
// marked.
double ssim(const ImageRGB& a, const ImageRGB& b, const ImageMask* mask = nullptr);

}  // namespace splatcolor
