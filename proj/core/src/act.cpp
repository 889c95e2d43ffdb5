#include "splatcolor/act.hpp"

#include <random>

#include "splatcolor/errors.hpp"
#include "splatcolor/sh.hpp"

namespace splatcolor {

ACTParams init_act(uint64_t seed, double sigma) {
    if (sigma < 0) throw InvalidInputError("init_act: sigma must be >= 0");
    ACTParams p;
    if (sigma == 0) return p;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (int c = 0; c < 3; ++c) p.w[c] += noise(rng);
    for (int c = 0; c < 3; ++c) p.b[c] += noise(rng);
    return p;
}

ACTParams average_act(const std::vector<ACTParams>& params) {
    if (params.empty()) throw InvalidInputError("average_act: empty parameter list");
    ACTParams mean;
    mean.w = Vec3::Zero();
    mean.b = Vec3::Zero();
    for (const ACTParams& p : params) {
        mean.w += p.w;
        mean.b += p.b;
    }
    mean.w /= static_cast<double>(params.size());
    mean.b /= static_cast<double>(params.size());
    return mean;
}

ACTGradient act_gradient(const ImageRGB& residual, const BlendCache& cache,
                         const SplatScene& scene, int sh_degree) {
    if (residual.width != cache.width || residual.height != cache.height)
        throw InvalidInputError("act_gradient: residual is " + std::to_string(residual.width) +
                                "x" + std::to_string(residual.height) + ", cache is " +
                                std::to_string(cache.width) + "x" + std::to_string(cache.height));

    const int active_degree =
        sh_degree < 0 ? scene.sh_degree : std::min(sh_degree, scene.sh_degree);
    const int n_coeffs = sh_coeff_count(active_degree);

    ACTGradient grad;
    std::array<double, kMaxShCoeffs> basis{};
    for (size_t pix = 0; pix < cache.pixel_count(); ++pix) {
        if (cache.offsets[pix] == cache.offsets[pix + 1]) continue;
        sh_basis(cache.dirs[pix], active_degree, basis);
        Vec3 weighted_color = Vec3::Zero();
        double weight_sum = 0.0;
        for (uint64_t k = cache.offsets[pix]; k < cache.offsets[pix + 1]; ++k) {
            const double wi = cache.weights[k];
            weighted_color += wi * sh_decode(scene.gaussians[cache.indices[k]].sh, basis, n_coeffs);
            weight_sum += wi;
        }
        const Vec3 r{residual.data[pix * 3], residual.data[pix * 3 + 1],
                     residual.data[pix * 3 + 2]};
        grad.w += r.cwiseProduct(weighted_color);
        grad.b += r * weight_sum;
    }
    return grad;
}

}  // namespace splatcolor
