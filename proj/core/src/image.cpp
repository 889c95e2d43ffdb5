#include "splatcolor/image.hpp"

#include "splatcolor/errors.hpp"

namespace splatcolor {

ImageGray to_luminance(const ImageRGB& img) {
    ImageGray out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(x, y) = luminance(img.at(x, y));
    return out;
}

ImageRGB box_downscale(const ImageRGB& img, int factor) {
    if (factor < 1) throw InvalidInputError("box_downscale: factor must be >= 1");
    if (factor == 1) return img;
    const int w = img.width / factor;
    const int h = img.height / factor;
    if (w == 0 || h == 0) throw InvalidInputError("box_downscale: image smaller than factor");
    ImageRGB out(w, h);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec3 acc = Vec3::Zero();
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx)
                    acc += img.at(x * factor + dx, y * factor + dy);
            out.set(x, y, acc * inv);
        }
    }
    return out;
}

ImageRGB box_downscale_adjoint(const ImageRGB& grad_coarse, int full_width, int full_height,
                               int factor) {
    ImageRGB out(full_width, full_height, 0.0);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < grad_coarse.height; ++y) {
        for (int x = 0; x < grad_coarse.width; ++x) {
            const Vec3 g = grad_coarse.at(x, y) * inv;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx)
                    out.set(x * factor + dx, y * factor + dy, g);
        }
    }
    return out;
}

}  // namespace splatcolor
