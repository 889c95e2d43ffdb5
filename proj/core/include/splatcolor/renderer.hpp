#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "splatcolor/camera.hpp"
#include "splatcolor/types.hpp"

namespace splatcolor {

// Compositing constants, matching the usual splatting rasterizers.
inline constexpr double kAlphaClip = 0.99;         // per-sample alpha ceiling
inline constexpr double kAlphaSkip = 1.0 / 255.0;  // drop near-invisible samples
inline constexpr double kTransmittanceStop = 1e-4;
inline constexpr double kNearClip = 1e-4;
inline constexpr double kRayParallelEps = 1e-9;

struct RayHit {
    double t;       // ray parameter; equals distance for unit-length dir
    double u, v;    // scale-normalized coordinates in the disk plane
    double g;       // falloff exp(-(u^2+v^2)/2)
};

// Exact intersection of a unit-direction ray with an oriented Gaussian disk.
// Misses (parallel ray, t <= kNearClip, or falloff beyond cull_sigma) return
// nullopt.
std::optional<RayHit> ray_splat_intersect(const Gaussian2D& g, const Vec3& origin,
                                          const Vec3& dir, double cull_sigma = 3.0);

// Per-pixel record of the blend: for fixed geometry, rendered color is an
// affine function of the SH coefficients, and this cache holds everything
// needed to re-evaluate that function (and its gradients) without touching
// the rasterizer again. Contributors are stored front to back in CSR layout.
struct BlendCache {
    int width = 0;
    int height = 0;
    std::vector<uint64_t> offsets;   // pixel_count + 1
    std::vector<uint32_t> indices;   // gaussian index per contributor
    std::vector<float> weights;      // blend weight w_i = alpha_i * T_i
    std::vector<Vec3> dirs;          // unit view direction per pixel
    std::vector<float> t_final;      // transmittance left for the background

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    size_t contributor_count() const { return indices.size(); }
    size_t memory_bytes() const;
};

struct RenderOptions {
    Vec3 background = Vec3::Zero();
    int sh_degree = -1;        // -1: use the scene's degree
    bool want_cache = false;
    int threads = 0;           // 0: all hardware threads
    double cull_sigma = 3.0;
    int tile_size = 16;
    // Approximate fast path: composite in a single global order (by camera-space
    // center depth) instead of sorting hits per pixel. Cheaper, but wrong
    // wherever disk intersection order differs from center order.
    bool global_center_sort = false;
};

struct RenderBuffers {
    ImageRGB color;
    ImageGray depth;  // blend-weighted camera-space z; 0 where accum == 0
    ImageGray accum;  // sum of blend weights per pixel
    std::shared_ptr<BlendCache> cache;  // present iff want_cache
};

// Forward rasterization: per pixel, disk hits sorted front to back by (t,
// index), alpha-composited with clip/skip thresholds above; color per sample
// is the SH decode (optionally mapped through `act` before blending), the
// background receives the remaining transmittance.
RenderBuffers render_view(const SplatScene& scene, const CameraView& camera,
                          const std::optional<ACTParams>& act, const RenderOptions& opts = {});

// Re-evaluates the affine blend for (possibly updated) SH coefficients on the
// frozen geometry recorded in the cache. Matches render_view's color output to
// ~1e-6 (weights are stored in float32); cost is independent of how many
// gaussians the scene holds beyond the recorded contributors.
// Throws DataError when the cache references a gaussian the scene lacks.
ImageRGB render_from_cache(const BlendCache& cache, const SplatScene& scene,
                           const std::optional<ACTParams>& act, const Vec3& background,
                           int sh_degree = -1, int threads = 0);

}  // namespace splatcolor
