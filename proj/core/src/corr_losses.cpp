#include "splatcolor/corr_losses.hpp"

#include <cmath>

#include "splatcolor/errors.hpp"

namespace splatcolor {

namespace {

void check_grids(const ImageRGB& rendered, const CorrespondenceMap& corr,
                 const std::vector<FeatureMap>& ref_feats, const char* who) {
    const FeatureGrid grid = feature_grid(rendered.width, rendered.height, corr.patch, corr.stride);
    if (grid.height_f != corr.height_f || grid.width_f != corr.width_f)
        throw InvalidInputError(std::string(who) + ": rendered image yields a " +
                                std::to_string(grid.width_f) + "x" + std::to_string(grid.height_f) +
                                " patch grid but the correspondence map is " +
                                std::to_string(corr.width_f) + "x" + std::to_string(corr.height_f));
    for (size_t r = 0; r < ref_feats.size(); ++r) {
        if (ref_feats[r].dim != 3)
            throw InvalidInputError(std::string(who) + ": reference feature map " +
                                    std::to_string(r) + " has dim " +
                                    std::to_string(ref_feats[r].dim) + ", patch means need 3");
        if (ref_feats[r].patch != corr.patch || ref_feats[r].stride != corr.stride)
            throw InvalidInputError(std::string(who) + ": reference feature map " +
                                    std::to_string(r) + " geometry differs from the matching grid");
    }
    for (const Correspondence& c : corr.cells) {
        if (c.ref < 0 || static_cast<size_t>(c.ref) >= ref_feats.size())
            throw InvalidInputError(std::string(who) + ": correspondence names reference " +
                                    std::to_string(c.ref) + " but only " +
                                    std::to_string(ref_feats.size()) + " maps were given");
        const FeatureMap& ref = ref_feats[c.ref];
        if (c.i < 0 || c.i >= ref.height_f || c.j < 0 || c.j >= ref.width_f)
            throw InvalidInputError(std::string(who) + ": matched cell out of reference grid");
    }
}

Vec3 patch_mean(const ImageRGB& img, int x0, int y0, int patch) {
    Vec3 sum = Vec3::Zero();
    for (int dy = 0; dy < patch; ++dy)
        for (int dx = 0; dx < patch; ++dx) {
            const size_t at = (static_cast<size_t>(y0 + dy) * img.width + x0 + dx) * 3;
            sum[0] += img.data[at];
            sum[1] += img.data[at + 1];
            sum[2] += img.data[at + 2];
        }
    return sum / (static_cast<double>(patch) * patch);
}

}  // namespace

CorrLoss tcm_loss(const ImageRGB& rendered, const CorrespondenceMap& corr,
                  const std::vector<FeatureMap>& ref_color_feats) {
    check_grids(rendered, corr, ref_color_feats, "tcm_loss");

    CorrLoss out;
    out.grad = ImageRGB(rendered.width, rendered.height);
    out.cells = corr.height_f * corr.width_f;
    if (out.cells == 0) return out;

    const int patch = corr.patch, stride = corr.stride;
    const double inv_cells = 1.0 / out.cells;
    const double inv_area = 1.0 / (static_cast<double>(patch) * patch);
    double total = 0;

    for (int i = 0; i < corr.height_f; ++i) {
        for (int j = 0; j < corr.width_f; ++j) {
            const Correspondence& c = corr.at(i, j);
            const std::span<const double> g = ref_color_feats[c.ref].cell(c.i, c.j);
            const Vec3 gv{g[0], g[1], g[2]};
            const Vec3 f = patch_mean(rendered, j * stride, i * stride, patch);

            const double nf = f.norm(), ng = gv.norm();
            Vec3 dgrad_df = Vec3::Zero();
            double dist;
            if (nf == 0 || ng == 0) {
                dist = 1.0;  // zero descriptors sit at distance 1, flat
            } else {
                const double dot = f.dot(gv);
                dist = 1.0 - dot / (nf * ng);
                dgrad_df = -(gv / (nf * ng)) + (dot / (nf * nf * nf * ng)) * f;
            }
            total += dist;

            const Vec3 per_pixel = inv_cells * inv_area * dgrad_df;
            if (per_pixel != Vec3::Zero()) {
                for (int dy = 0; dy < patch; ++dy)
                    for (int dx = 0; dx < patch; ++dx) {
                        const size_t at =
                            (static_cast<size_t>(i * stride + dy) * rendered.width +
                             (j * stride + dx)) * 3;
                        out.grad.data[at] += per_pixel[0];
                        out.grad.data[at + 1] += per_pixel[1];
                        out.grad.data[at + 2] += per_pixel[2];
                    }
            }
        }
    }
    out.loss = total * inv_cells;
    return out;
}

CorrLoss ccm_loss(const ImageRGB& rendered, const CorrespondenceMap& corr,
                  const std::vector<FeatureMap>& ref_color_feats) {
    check_grids(rendered, corr, ref_color_feats, "ccm_loss");
    if (corr.stride <= 0 || corr.patch % corr.stride != 0)
        throw InvalidInputError("ccm_loss: patch grid misalignment, patch " +
                                std::to_string(corr.patch) + " is not a multiple of stride " +
                                std::to_string(corr.stride));

    const int patch = corr.patch, stride = corr.stride;
    const int step = patch / stride;

    CorrLoss out;
    out.grad = ImageRGB(rendered.width, rendered.height);
    for (int i = 0; i < corr.height_f; i += step)
        for (int j = 0; j < corr.width_f; j += step) ++out.cells;
    if (out.cells == 0) return out;

    const double inv_n = 1.0 / out.cells;
    const double pixel_scale = 2.0 * inv_n / (static_cast<double>(patch) * patch);
    double total = 0;

    for (int i = 0; i < corr.height_f; i += step) {
        for (int j = 0; j < corr.width_f; j += step) {
            const Correspondence& c = corr.at(i, j);
            const std::span<const double> g = ref_color_feats[c.ref].cell(c.i, c.j);
            const Vec3 mean_ref{g[0], g[1], g[2]};
            const Vec3 diff = patch_mean(rendered, j * stride, i * stride, patch) - mean_ref;
            total += diff.squaredNorm();

            const Vec3 per_pixel = pixel_scale * diff;
            for (int dy = 0; dy < patch; ++dy)
                for (int dx = 0; dx < patch; ++dx) {
                    const size_t at = (static_cast<size_t>(i * stride + dy) * rendered.width +
                                       (j * stride + dx)) * 3;
                    out.grad.data[at] += per_pixel[0];
                    out.grad.data[at + 1] += per_pixel[1];
                    out.grad.data[at + 2] += per_pixel[2];
                }
        }
    }
    out.loss = total * inv_n;
    return out;
}

}  // namespace splatcolor
