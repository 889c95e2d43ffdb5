#pragma once

#include <string>

#include "splatcolor/point_cloud.hpp"
#include "splatcolor/spatial_index.hpp"
#include "splatcolor/types.hpp"

namespace splatcolor {

// Search radius for pseudo-color assignment: either absolute world units or a
// multiple of the cloud's median nearest-neighbor spacing.
struct RadiusPolicy {
    enum class Mode { kAbsolute, kMedianScale };
    Mode mode = Mode::kMedianScale;
    double value = 3.0;
};

// Resolves the policy against a concrete cloud. Throws InvalidInputError when
// the resolved radius is not > 0.
double resolve_radius(const RadiusPolicy& policy, const std::vector<Vec3>& positions);

// Per-pixel optional supervision colors for one uncolored view.
struct PseudoColorMap {
    int width = 0;
    int height = 0;
    ImageRGB colors;  // defined only where valid
    ImageMask valid;
    size_t n_valid = 0;
};

// Assigns each masked, covered pixel the color of the nearest cloud point
// within `radius` of its unprojected location; pixels with no neighbor in
// range stay invalid and drop out of the loss.
PseudoColorMap compute_pseudo_colors(const CameraView& view, const ImageGray& depth,
                                     const ImageGray& accum, const ImageMask& mask,
                                     const SpatialIndex& index, const ColoredPointCloud& cloud,
                                     double radius, double coverage_threshold = 0.5,
                                     int threads = 0);

struct PseudoColorLoss {
    double loss = 0;
    ImageRGB grad;     // dLoss/dRendered, zero outside valid pixels
    size_t n_valid = 0;
};

// L1 supervision against the pseudo-colors, normalized by the valid count:
// loss = (1/N) * sum_valid sum_ch |pc - rendered|, gradient -sign(pc -
// rendered)/N with sign(0) = 0. N = 0 yields loss 0 and a zero gradient (the
// caller can warn via n_valid). Throws InvalidInputError on size mismatch.
PseudoColorLoss pseudo_color_loss(const PseudoColorMap& pc, const ImageRGB& rendered);

// Inspection/export: 16-bit color PNG plus a 0/255 validity PNG.
void save_pseudo_map(const PseudoColorMap& map, const std::string& color_path,
                     const std::string& valid_path);

}  // namespace splatcolor
