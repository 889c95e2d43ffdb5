#include "splatcolor/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splatcolor/errors.hpp"
#include "splatcolor/parallel.hpp"
#include "splatcolor/sh.hpp"

namespace splatcolor {

size_t BlendCache::memory_bytes() const {
    return offsets.size() * sizeof(uint64_t) + indices.size() * sizeof(uint32_t) +
           weights.size() * sizeof(float) + dirs.size() * sizeof(Vec3) +
           t_final.size() * sizeof(float);
}

std::optional<RayHit> ray_splat_intersect(const Gaussian2D& g, const Vec3& origin,
                                          const Vec3& dir, double cull_sigma) {
    const Mat3 frame = g.frame();
    const Vec3 normal = frame.col(2);
    const double denom = normal.dot(dir);
    if (std::abs(denom) < kRayParallelEps) return std::nullopt;
    const double t = normal.dot(g.center - origin) / denom;
    if (t <= kNearClip) return std::nullopt;
    const Vec3 d = origin + t * dir - g.center;
    const Vec2 s = g.scales();
    const double u = d.dot(frame.col(0)) / s[0];
    const double v = d.dot(frame.col(1)) / s[1];
    const double r2 = u * u + v * v;
    if (r2 > cull_sigma * cull_sigma) return std::nullopt;
    return RayHit{t, u, v, std::exp(-0.5 * r2)};
}

namespace {

struct ScreenBounds {
    int x0, y0, x1, y1;  // half-open pixel rectangle
    bool empty() const { return x0 >= x1 || y0 >= y1; }
};

// Conservative pixel rectangle covering the projection of a sphere of radius r
// around the disk center (the disk within the cull radius fits inside it).
// The extremes of x/z over a circle at (a, b) with radius r are the slopes of
// the tangent lines through the origin. A sphere poking through the near plane
// falls back to the whole image.
ScreenBounds project_bounds(const CameraView& cam, const Vec3& center_cam, double r) {
    const double qz = center_cam.z();
    if (qz - r <= kNearClip)
        return {0, 0, cam.width, cam.height};

    auto slope_range = [&](double a, double b) {
        const double disc = std::sqrt(std::max(0.0, a * a + b * b - r * r));
        const double den = b * b - r * r;
        const double lo = (a * b - r * disc) / den;
        const double hi = (a * b + r * disc) / den;
        return std::pair<double, double>(lo, hi);
    };
    const auto [mx0, mx1] = slope_range(center_cam.x(), qz);
    const auto [my0, my1] = slope_range(center_cam.y(), qz);

    ScreenBounds sb;
    sb.x0 = std::max(0, static_cast<int>(std::floor(cam.fx * mx0 + cam.cx)));
    sb.x1 = std::min(cam.width, static_cast<int>(std::ceil(cam.fx * mx1 + cam.cx)) + 1);
    sb.y0 = std::max(0, static_cast<int>(std::floor(cam.fy * my0 + cam.cy)));
    sb.y1 = std::min(cam.height, static_cast<int>(std::ceil(cam.fy * my1 + cam.cy)) + 1);
    return sb;
}

struct PixelHit {
    double t;
    uint32_t index;
    double alpha;
};

// Decoded per-gaussian color at a pixel: SH decode, then the optional per-view
// affine map. Blending happens on the mapped value.
inline Vec3 sample_color(const Gaussian2D& g, const std::array<double, kMaxShCoeffs>& basis,
                         int n_coeffs, const std::optional<ACTParams>& act) {
    Vec3 c = sh_decode(g.sh, basis, n_coeffs);
    if (act) c = act->w.cwiseProduct(c) + act->b;
    return c;
}

}  // namespace

RenderBuffers render_view(const SplatScene& scene, const CameraView& camera,
                          const std::optional<ACTParams>& act, const RenderOptions& opts) {
    camera.validate();
    const int w = camera.width;
    const int h = camera.height;
    const size_t n = scene.size();

    const int active_degree =
        opts.sh_degree < 0 ? scene.sh_degree : std::min(opts.sh_degree, scene.sh_degree);
    const int n_coeffs = sh_coeff_count(active_degree);

    // Tile binning from conservative screen bounds; gaussians behind the near
    // plane (by center) are culled outright.
    const int ts = std::max(1, opts.tile_size);
    const int tiles_x = (w + ts - 1) / ts;
    const int tiles_y = (h + ts - 1) / ts;
    std::vector<std::vector<uint32_t>> tile_lists(static_cast<size_t>(tiles_x) * tiles_y);
    std::vector<double> center_z(n);
    for (size_t i = 0; i < n; ++i) {
        const Vec3 cc = camera.to_camera(scene.gaussians[i].center);
        center_z[i] = cc.z();
        if (cc.z() <= kNearClip) continue;  // center behind: cull like the usual rasterizers
        const Vec2 s = scene.gaussians[i].scales();
        const double radius = opts.cull_sigma * std::max(s[0], s[1]);
        const ScreenBounds sb = project_bounds(camera, cc, radius);
        if (sb.empty()) continue;
        for (int ty = sb.y0 / ts; ty <= (sb.y1 - 1) / ts; ++ty)
            for (int tx = sb.x0 / ts; tx <= (sb.x1 - 1) / ts; ++tx)
                tile_lists[static_cast<size_t>(ty) * tiles_x + tx].push_back(
                    static_cast<uint32_t>(i));
    }

    // Optional approximate ordering: one global front-to-back order by center
    // depth instead of an exact per-pixel sort.
    std::vector<uint32_t> rank;
    if (opts.global_center_sort) {
        std::vector<uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            return center_z[a] != center_z[b] ? center_z[a] < center_z[b] : a < b;
        });
        rank.resize(n);
        for (uint32_t pos = 0; pos < n; ++pos) rank[order[pos]] = pos;
        for (auto& list : tile_lists)
            std::sort(list.begin(), list.end(),
                      [&](uint32_t a, uint32_t b) { return rank[a] < rank[b]; });
    }

    RenderBuffers out;
    out.color = ImageRGB(w, h);
    out.depth = ImageGray(w, h);
    out.accum = ImageGray(w, h);
    if (opts.want_cache) {
        out.cache = std::make_shared<BlendCache>();
        out.cache->width = w;
        out.cache->height = h;
        out.cache->dirs.resize(static_cast<size_t>(w) * h);
        out.cache->t_final.resize(static_cast<size_t>(w) * h);
    }
    std::vector<std::vector<std::pair<uint32_t, float>>> pixel_contribs;
    if (opts.want_cache) pixel_contribs.resize(static_cast<size_t>(w) * h);

    const size_t tile_count = tile_lists.size();
    parallel_for_static(tile_count, opts.threads, [&](size_t tile, int) {
        const int tx = static_cast<int>(tile % tiles_x);
        const int ty = static_cast<int>(tile / tiles_x);
        const int x1 = std::min(w, (tx + 1) * ts);
        const int y1 = std::min(h, (ty + 1) * ts);
        const std::vector<uint32_t>& candidates = tile_lists[tile];

        std::vector<PixelHit> hits;
        std::array<double, kMaxShCoeffs> basis{};
        for (int py = ty * ts; py < y1; ++py) {
            for (int px = tx * ts; px < x1; ++px) {
                const size_t pix = static_cast<size_t>(py) * w + px;
                const PixelRay ray = pixel_ray(camera, {px + 0.5, py + 0.5});

                hits.clear();
                for (uint32_t gi : candidates) {
                    const auto hit = ray_splat_intersect(scene.gaussians[gi], ray.origin,
                                                         ray.dir, opts.cull_sigma);
                    if (!hit) continue;
                    const double alpha =
                        std::min(kAlphaClip, scene.gaussians[gi].opacity() * hit->g);
                    if (alpha < kAlphaSkip) continue;
                    hits.push_back({hit->t, gi, alpha});
                }
                if (!opts.global_center_sort)
                    std::sort(hits.begin(), hits.end(), [](const PixelHit& a, const PixelHit& b) {
                        return a.t != b.t ? a.t < b.t : a.index < b.index;
                    });

                sh_basis(ray.dir, active_degree, basis);
                double T = 1.0;
                Vec3 color = Vec3::Zero();
                double depth_num = 0.0;
                double accum = 0.0;
                for (const PixelHit& hit : hits) {
                    const double alpha = hit.alpha;
                    const double T_next = T * (1.0 - alpha);
                    if (T_next < kTransmittanceStop) break;
                    const double wi = alpha * T;
                    color += wi * sample_color(scene.gaussians[hit.index], basis, n_coeffs, act);
                    depth_num += wi * hit.t * ray.dz;
                    accum += wi;
                    if (opts.want_cache)
                        pixel_contribs[pix].emplace_back(hit.index, static_cast<float>(wi));
                    T = T_next;
                }
                color += T * opts.background;

                out.color.set(px, py, color);
                out.accum.data[pix] = accum;
                out.depth.data[pix] = accum > 0.0 ? depth_num / accum : 0.0;
                if (opts.want_cache) {
                    out.cache->dirs[pix] = ray.dir;
                    out.cache->t_final[pix] = static_cast<float>(T);
                }
            }
        }
    });

    if (opts.want_cache) {
        BlendCache& cache = *out.cache;
        cache.offsets.resize(pixel_contribs.size() + 1);
        cache.offsets[0] = 0;
        for (size_t i = 0; i < pixel_contribs.size(); ++i)
            cache.offsets[i + 1] = cache.offsets[i] + pixel_contribs[i].size();
        cache.indices.resize(cache.offsets.back());
        cache.weights.resize(cache.offsets.back());
        for (size_t i = 0; i < pixel_contribs.size(); ++i) {
            uint64_t at = cache.offsets[i];
            for (const auto& [gi, wi] : pixel_contribs[i]) {
                cache.indices[at] = gi;
                cache.weights[at] = wi;
                ++at;
            }
        }
    }
    return out;
}

ImageRGB render_from_cache(const BlendCache& cache, const SplatScene& scene,
                           const std::optional<ACTParams>& act, const Vec3& background,
                           int sh_degree, int threads) {
    if (cache.offsets.size() != cache.pixel_count() + 1)
        throw DataError("blend cache offsets are inconsistent with its dimensions");
    for (uint32_t gi : cache.indices)
        if (gi >= scene.size())
            throw DataError("blend cache references gaussian " + std::to_string(gi) +
                            " but the scene holds " + std::to_string(scene.size()));

    const int active_degree =
        sh_degree < 0 ? scene.sh_degree : std::min(sh_degree, scene.sh_degree);
    const int n_coeffs = sh_coeff_count(active_degree);

    ImageRGB img(cache.width, cache.height);
    parallel_for_static(cache.pixel_count(), threads, [&](size_t pix, int) {
        std::array<double, kMaxShCoeffs> basis{};
        sh_basis(cache.dirs[pix], active_degree, basis);
        Vec3 color = Vec3::Zero();
        for (uint64_t k = cache.offsets[pix]; k < cache.offsets[pix + 1]; ++k) {
            const double wi = cache.weights[k];
            color += wi * sample_color(scene.gaussians[cache.indices[k]], basis, n_coeffs, act);
        }
        color += static_cast<double>(cache.t_final[pix]) * background;
        img.data[pix * 3 + 0] = color[0];
        img.data[pix * 3 + 1] = color[1];
        img.data[pix * 3 + 2] = color[2];
    });
    return img;
}

}  // namespace splatcolor
