#include "splatcolor/pseudo_color.hpp"

#include <cmath>

#include "splatcolor/camera.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/image_io.hpp"
#include "splatcolor/parallel.hpp"

namespace splatcolor {

double resolve_radius(const RadiusPolicy& policy, const std::vector<Vec3>& positions) {
    double radius = policy.value;
    if (policy.mode == RadiusPolicy::Mode::kMedianScale)
        radius = policy.value * median_nn_spacing(positions);
    if (!(radius > 0))
        throw InvalidInputError("search radius resolved to " + std::to_string(radius) +
                                "; it must be positive");
    return radius;
}

PseudoColorMap compute_pseudo_colors(const CameraView& view, const ImageGray& depth,
                                     const ImageGray& accum, const ImageMask& mask,
                                     const SpatialIndex& index, const ColoredPointCloud& cloud,
                                     double radius, double coverage_threshold, int threads) {
    const int w = view.width, h = view.height;
    if (depth.width != w || depth.height != h || accum.width != w || accum.height != h ||
        mask.width != w || mask.height != h)
        throw InvalidInputError("compute_pseudo_colors: buffer sizes do not match view '" +
                                view.id + "'");
    if (index.size() != cloud.size())
        throw InvalidInputError("compute_pseudo_colors: index holds " +
                                std::to_string(index.size()) + " points, cloud " +
                                std::to_string(cloud.size()));

    PseudoColorMap map;
    map.width = w;
    map.height = h;
    map.colors = ImageRGB(w, h);
    map.valid = ImageMask(w, h);

    parallel_for_static(static_cast<size_t>(h), threads, [&](size_t row, int) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < w; ++x) {
            const size_t pix = static_cast<size_t>(y) * w + x;
            if (!mask.data[pix]) continue;
            if (accum.data[pix] <= coverage_threshold) continue;
            const double z = depth.data[pix];
            if (z <= 0) continue;
            const Vec3 p = unproject(view, {x + 0.5, y + 0.5}, z);
            const auto nn = index.nn_within_radius(p, radius);
            if (!nn) continue;
            map.colors.set(x, y, cloud.colors[nn->index]);
            map.valid.data[pix] = 1;
        }
    });
    map.n_valid = map.valid.count_true();
    return map;
}

PseudoColorLoss pseudo_color_loss(const PseudoColorMap& pc, const ImageRGB& rendered) {
    if (pc.width != rendered.width || pc.height != rendered.height)
        throw InvalidInputError("pseudo_color_loss: rendered image is " +
                                std::to_string(rendered.width) + "x" +
                                std::to_string(rendered.height) + ", map is " +
                                std::to_string(pc.width) + "x" + std::to_string(pc.height));

    PseudoColorLoss out;
    out.grad = ImageRGB(pc.width, pc.height);
    out.n_valid = pc.n_valid;
    if (pc.n_valid == 0) return out;

    const double inv_n = 1.0 / static_cast<double>(pc.n_valid);
    double total = 0;
    const size_t pixels = static_cast<size_t>(pc.width) * pc.height;
    for (size_t pix = 0; pix < pixels; ++pix) {
        if (!pc.valid.data[pix]) continue;
        for (int c = 0; c < 3; ++c) {
            const double diff = pc.colors.data[pix * 3 + c] - rendered.data[pix * 3 + c];
            total += std::abs(diff);
            // d|pc - r|/dr = -sign(pc - r), with the kink at 0 mapped to 0.
            out.grad.data[pix * 3 + c] = diff > 0 ? -inv_n : (diff < 0 ? inv_n : 0.0);
        }
    }
    out.loss = total * inv_n;
    return out;
}

void save_pseudo_map(const PseudoColorMap& map, const std::string& color_path,
                     const std::string& valid_path) {
    save_image(map.colors, color_path, 16);
    save_mask(map.valid, valid_path);
}

}  // namespace splatcolor
