#pragma once

#include <string>
#include <vector>

#include "splatcolor/types.hpp"

namespace splatcolor {

// Colored 3D points produced by unprojecting reference-view pixels with the
// depth rendered from the grayscale model.
struct ColoredPointCloud {
    std::vector<Vec3> positions;
    std::vector<Vec3> colors;               // rgb in [0,1]
    std::vector<std::string> source_view;   // view id per point
    std::vector<std::pair<int, int>> source_pixel;  // (x, y) per point

    size_t size() const { return positions.size(); }
};

// One colorized reference view plus the buffers rendered from the grayscale
// model that make its pixels unprojectable.
struct ColorViewInput {
    CameraView camera;
    ImageRGB color;
    ImageMask mask;
    ImageGray depth;  // camera-space z per pixel
    ImageGray accum;  // blend-weight sum per pixel (coverage)
};

// Unprojects every masked foreground pixel (sampled at `stride`) whose
// coverage exceeds `coverage_threshold`. Point order follows (view, row,
// column), which the NN tie-break inherits.
// Throws InvalidInputError on missing/mismatched buffers or stride < 1,
// DataError when no pixel survives (empty cloud).
ColoredPointCloud build_point_cloud(const std::vector<ColorViewInput>& views, int stride = 1,
                                    double coverage_threshold = 0.5);

// Inspection export, binary little-endian PLY with x,y,z floats and 8-bit
// red,green,blue.
void save_cloud_ply(const ColoredPointCloud& cloud, const std::string& path);

}  // namespace splatcolor
