#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace splatcolor {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Interleaved RGB, row-major, linear values nominally in [0,1]. Renders may
// exceed the range; quantization to 8/16-bit happens only at PNG boundaries.
struct ImageRGB {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // 3 * width * height

    ImageRGB() = default;
    ImageRGB(int w, int h, double fill = 0.0) : width(w), height(h), data(3ull * w * h, fill) {}

    double* px(int x, int y) { return data.data() + 3ull * (static_cast<size_t>(y) * width + x); }
    const double* px(int x, int y) const {
        return data.data() + 3ull * (static_cast<size_t>(y) * width + x);
    }
    Vec3 at(int x, int y) const {
        const double* p = px(x, y);
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, const Vec3& c) {
        double* p = px(x, y);
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

struct ImageGray {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // width * height

    ImageGray() = default;
    ImageGray(int w, int h, double fill = 0.0) : width(w), height(h), data(1ull * w * h, fill) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

// Boolean per pixel; true = foreground.
struct ImageMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    ImageMask() = default;
    ImageMask(int w, int h, bool fill = false)
        : width(w), height(h), data(1ull * w * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return data[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t count_true() const {
        size_t n = 0;
        for (uint8_t v : data) n += (v != 0);
        return n;
    }
};

inline double luminance(const Vec3& rgb) {
    return 0.2126 * rgb[0] + 0.7152 * rgb[1] + 0.0722 * rgb[2];
}

ImageGray to_luminance(const ImageRGB& img);

// Mean over a 'factor'-sized block per output pixel; trailing rows/columns
// that do not fill a block are dropped.
ImageRGB box_downscale(const ImageRGB& img, int factor);

// Adjoint of box_downscale: spreads each coarse-grid gradient value evenly
// over its source block (1/factor^2 each). Output has full-res dimensions.
ImageRGB box_downscale_adjoint(const ImageRGB& grad_coarse, int full_width, int full_height,
                               int factor);

}  // namespace splatcolor
