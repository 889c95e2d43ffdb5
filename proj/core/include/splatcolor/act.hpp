#pragma once

#include <cstdint>
#include <vector>

#include "splatcolor/renderer.hpp"
#include "splatcolor/types.hpp"

namespace splatcolor {

inline Vec3 apply_act(const Vec3& color, const ACTParams& p) {
    return p.w.cwiseProduct(color) + p.b;
}

// Identity plus N(0, sigma^2) perturbations from a seeded generator (draw
// order w0..w2 then b0..b2). sigma = 0 returns the exact identity.
// Throws InvalidInputError for sigma < 0.
ACTParams init_act(uint64_t seed, double sigma = 0.01);

// Component-wise mean, used for views without fitted parameters.
// Throws InvalidInputError on an empty list.
ACTParams average_act(const std::vector<ACTParams>& params);

struct ACTGradient {
    Vec3 w = Vec3::Zero();
    Vec3 b = Vec3::Zero();
};

// Gradient of a pixel loss with respect to this view's ACT parameters, given
// residual = dLoss/dRenderedColor. Per channel c:
//   grad_b[c] = sum_px residual_c * sum_i w_i
//   grad_w[c] = sum_px residual_c * sum_i w_i * L_ic
// with L the pre-transform decoded gaussian colors from the cache's geometry.
// Throws InvalidInputError when residual and cache dimensions differ.
ACTGradient act_gradient(const ImageRGB& residual, const BlendCache& cache,
                         const SplatScene& scene, int sh_degree = -1);

}  // namespace splatcolor
