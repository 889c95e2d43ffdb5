#pragma once

#include <span>
#include <string>
#include <vector>

#include "splatcolor/image.hpp"

namespace splatcolor {

// Dense grid of per-patch descriptors. Cell (i, j) covers the pixel patch
// anchored at (j*stride, i*stride), patch pixels square. Vectors are stored
// row-major by cell, contiguous per cell.
struct FeatureMap {
    int height_f = 0;
    int width_f = 0;
    int dim = 0;
    int patch = 0;
    int stride = 0;
    std::vector<double> data;

    size_t cell_count() const { return static_cast<size_t>(height_f) * width_f; }
    std::span<const double> cell(int i, int j) const {
        return {data.data() + (static_cast<size_t>(i) * width_f + j) * dim,
                static_cast<size_t>(dim)};
    }
    std::span<double> cell(int i, int j) {
        return {data.data() + (static_cast<size_t>(i) * width_f + j) * dim,
                static_cast<size_t>(dim)};
    }
};

// Grid dimensions an image yields for a patch/stride pair (full patches only).
struct FeatureGrid {
    int height_f = 0;
    int width_f = 0;
};
FeatureGrid feature_grid(int width, int height, int patch, int stride);

// Matching descriptor: the flattened patch, mean-subtracted and
// L2-normalized; flat patches keep the zero vector. Callers are expected to
// hand in the coarse (downscaled) grayscale image; this function does not
// rescale. Throws InvalidInputError for patch < 2, stride < 1, or an image
// smaller than one patch.
FeatureMap extract_features_builtin(const ImageGray& img, int patch, int stride);

// Differentiable loss-side descriptor: per-cell mean color (dim 3). Linear in
// the image, so gradients pass through it exactly.
FeatureMap extract_patch_means(const ImageRGB& img, int patch, int stride);

// Precomputed feature files: raw little-endian float32 payload plus a JSON
// sidecar at <data_path>.json describing the grid.
struct FeatureFileInfo {
    std::string view_id;
    std::string role;  // "gray" or "color"
};
void save_feature_map(const FeatureMap& map, const std::string& data_path,
                      const FeatureFileInfo& info);
FeatureMap load_feature_map(const std::string& data_path, FeatureFileInfo* info = nullptr);

}  // namespace splatcolor
