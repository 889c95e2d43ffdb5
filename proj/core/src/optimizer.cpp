#include "splatcolor/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "splatcolor/act.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/parallel.hpp"
#include "splatcolor/sh.hpp"

namespace splatcolor {

void LossWeights::validate() const {
    if (lambda_pc < 0 || lambda_tcm < 0 || lambda_cc < 0)
        throw InvalidInputError("loss weights must be nonnegative");
    if (lambda_pc == 0 && lambda_tcm == 0 && lambda_cc == 0)
        throw InvalidInputError("at least one loss weight must be positive");
}

void OptimizerConfig::validate() const {
    if (iterations <= 0) throw InvalidInputError("iterations must be > 0");
    if (!(sh_lr > 0) || !(act_lr > 0)) throw InvalidInputError("learning rates must be > 0");
    if (!(sh_rest_lr_div > 0)) throw InvalidInputError("sh_rest_lr_div must be > 0");
    if (!(sh_lr_final_scale > 0) || sh_lr_final_scale > 1)
        throw InvalidInputError("sh_lr_final_scale must be in (0, 1]");
    if (sh_degree_interval <= 0) throw InvalidInputError("sh_degree_interval must be > 0");
}

void write_train_log_csv(const std::vector<TrainLogRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write training log: " + path);
    f << "iteration,view,loss,l1,pseudo_color,tcm,coarse_color,wall_seconds\n";
    char buf[64];
    for (const TrainLogRow& r : rows) {
        f << r.iteration << ',' << r.view_id << ',';
        auto num = [&](double v) {
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            f << buf;
        };
        num(r.loss_total); f << ',';
        num(r.loss_l1); f << ',';
        num(r.loss_pc); f << ',';
        num(r.loss_tcm); f << ',';
        num(r.loss_cc); f << ',';
        num(r.wall_seconds); f << '\n';
    }
}

namespace {

size_t sh_param_count(const SplatScene& scene) {
    return scene.size() * 3 * static_cast<size_t>(scene.sh_coeff_count());
}

void gather_sh(const SplatScene& scene, std::vector<double>& theta) {
    const size_t n = scene.sh_coeff_count();
    theta.resize(sh_param_count(scene));
    size_t at = 0;
    for (const Gaussian2D& g : scene.gaussians)
        for (int ch = 0; ch < 3; ++ch) {
            std::copy_n(g.sh[ch].data(), n, theta.data() + at);
            at += n;
        }
}

void scatter_sh(const std::vector<double>& theta, SplatScene& scene) {
    const size_t n = scene.sh_coeff_count();
    size_t at = 0;
    for (Gaussian2D& g : scene.gaussians)
        for (int ch = 0; ch < 3; ++ch) {
            std::copy_n(theta.data() + at, n, g.sh[ch].data());
            at += n;
        }
}

// Masked L1 between a rendered color image and a target; residual is the loss
// derivative w.r.t. the rendered pixels (sign(0) = 0), normalized by
// 3 * masked-pixel count. The target reader abstracts gray vs color targets.
template <typename TargetAt>
double masked_l1(const ImageRGB& rendered, const ImageMask& mask, size_t n_mask,
                 TargetAt target_at, ImageRGB& residual) {
    const double inv = 1.0 / (3.0 * static_cast<double>(n_mask));
    double total = 0;
    for (size_t pix = 0; pix < rendered.pixel_count(); ++pix) {
        if (!mask.data[pix]) continue;
        for (int c = 0; c < 3; ++c) {
            const double diff = rendered.data[pix * 3 + c] - target_at(pix, c);
            total += std::abs(diff);
            residual.data[pix * 3 + c] = diff > 0 ? inv : (diff < 0 ? -inv : 0.0);
        }
    }
    return total * inv;
}

double masked_psnr(const ImageRGB& rendered, const ImageMask& mask, size_t n_mask,
                   const ImageGray& gray_target) {
    double se = 0;
    for (size_t pix = 0; pix < rendered.pixel_count(); ++pix) {
        if (!mask.data[pix]) continue;
        for (int c = 0; c < 3; ++c) {
            const double d = rendered.data[pix * 3 + c] - gray_target.data[pix];
            se += d * d;
        }
    }
    const double mse = se / (3.0 * static_cast<double>(n_mask));
    if (mse <= 0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

// Seeded per-epoch view order; one optimizer step consumes one view.
class ViewSchedule {
public:
    ViewSchedule(size_t views, uint64_t seed) : order_(views), rng_(seed) {
        std::iota(order_.begin(), order_.end(), size_t{0});
    }
    size_t pick(int step) {
        if (step % order_.size() == 0) std::shuffle(order_.begin(), order_.end(), rng_);
        return order_[step % order_.size()];
    }

private:
    std::vector<size_t> order_;
    std::mt19937_64 rng_;
};

double decayed_lr(const OptimizerConfig& cfg, int step) {
    if (cfg.iterations <= 1) return cfg.sh_lr * cfg.sh_lr_final_scale;
    const double progress = static_cast<double>(step) / (cfg.iterations - 1);
    return cfg.sh_lr * std::pow(cfg.sh_lr_final_scale, progress);
}

}  // namespace

void accumulate_sh_gradient(const BlendCache& cache, const SplatScene& scene,
                            const std::optional<ACTParams>& act, const ImageRGB& residual,
                            int active_degree, int threads, std::vector<double>& grad) {
    if (residual.width != cache.width || residual.height != cache.height)
        throw InvalidInputError("accumulate_sh_gradient: residual/cache size mismatch");
    if (grad.size() != sh_param_count(scene))
        throw InvalidInputError("accumulate_sh_gradient: gradient buffer has wrong size");
    for (uint32_t gi : cache.indices)
        if (gi >= scene.size())
            throw DataError("blend cache references gaussian " + std::to_string(gi) +
                            " but the scene holds " + std::to_string(scene.size()));

    const int n_full = scene.sh_coeff_count();
    const int degree = std::min(active_degree < 0 ? scene.sh_degree : active_degree,
                                scene.sh_degree);
    const int n_active = sh_coeff_count(degree);
    const Vec3 gain = act ? act->w : Vec3::Ones();

    const int workers = effective_threads(threads);
    auto run = [&](std::vector<double>& out, size_t pix_begin, size_t pix_end) {
        std::array<double, kMaxShCoeffs> basis{};
        std::array<bool, 3> live{};
        for (size_t pix = pix_begin; pix < pix_end; ++pix) {
            if (cache.offsets[pix] == cache.offsets[pix + 1]) continue;
            const double r0 = residual.data[pix * 3];
            const double r1 = residual.data[pix * 3 + 1];
            const double r2 = residual.data[pix * 3 + 2];
            if (r0 == 0 && r1 == 0 && r2 == 0) continue;
            const double r[3] = {r0, r1, r2};
            sh_basis(cache.dirs[pix], degree, basis);
            for (uint64_t k = cache.offsets[pix]; k < cache.offsets[pix + 1]; ++k) {
                const uint32_t gi = cache.indices[k];
                const double w = cache.weights[k];
                sh_decode(scene.gaussians[gi].sh, basis, n_active, &live);
                for (int ch = 0; ch < 3; ++ch) {
                    if (!live[ch] || r[ch] == 0) continue;
                    const double s = r[ch] * gain[ch] * w;
                    double* dst = out.data() + (static_cast<size_t>(gi) * 3 + ch) * n_full;
                    for (int m = 0; m < n_active; ++m) dst[m] += s * basis[m];
                }
            }
        }
    };

    if (workers == 1) {
        run(grad, 0, cache.pixel_count());
        return;
    }
    // Per-worker buffers merged in worker order keep the reduction order fixed
    // for a given thread count.
    std::vector<std::vector<double>> parts(workers);
    const size_t pixels = cache.pixel_count();
    parallel_for_static(static_cast<size_t>(workers), workers, [&](size_t wkr, int) {
        const size_t begin = pixels * wkr / workers;
        const size_t end = pixels * (wkr + 1) / workers;
        parts[wkr].assign(grad.size(), 0.0);
        run(parts[wkr], begin, end);
    });
    for (const auto& part : parts)
        for (size_t i = 0; i < grad.size(); ++i) grad[i] += part[i];
}

FitGrayResult fit_grayscale(SplatScene& scene, const std::vector<GrayView>& views,
                            const OptimizerConfig& config, bool use_act, double act_sigma) {
    config.validate();
    scene.validate();
    if (views.empty()) throw InvalidInputError("fit_grayscale: no views");
    std::vector<size_t> mask_counts(views.size());
    for (size_t v = 0; v < views.size(); ++v) {
        const GrayView& gv = views[v];
        gv.camera.validate();
        if (gv.target.width != gv.camera.width || gv.target.height != gv.camera.height)
            throw InvalidInputError("view '" + gv.camera.id + "': target image size mismatch");
        if (gv.mask.width != gv.camera.width || gv.mask.height != gv.camera.height)
            throw InvalidInputError("view '" + gv.camera.id + "': mask size mismatch");
        mask_counts[v] = gv.mask.count_true();
        if (mask_counts[v] == 0)
            throw InvalidInputError("view '" + gv.camera.id + "': empty mask");
    }

    // Geometry never moves, so each view's blend structure is computed once.
    RenderOptions ropt;
    ropt.want_cache = true;
    ropt.threads = config.threads;
    ropt.background = config.background;
    std::vector<std::shared_ptr<BlendCache>> caches(views.size());
    for (size_t v = 0; v < views.size(); ++v)
        caches[v] = render_view(scene, views[v].camera, std::nullopt, ropt).cache;

    FitGrayResult result;
    result.act.resize(views.size());
    if (use_act)
        for (size_t v = 0; v < views.size(); ++v)
            result.act[v] = init_act(config.seed + v, act_sigma);

    const int n_full = scene.sh_coeff_count();
    std::vector<double> theta_sh;
    gather_sh(scene, theta_sh);
    std::vector<double> theta_act(6 * views.size());
    for (size_t v = 0; v < views.size(); ++v) {
        for (int c = 0; c < 3; ++c) {
            theta_act[v * 6 + c] = result.act[v].w[c];
            theta_act[v * 6 + 3 + c] = result.act[v].b[c];
        }
    }

    AdamState adam_sh(theta_sh.size());
    AdamState adam_act(theta_act.size());
    std::vector<double> grad_sh(theta_sh.size());
    std::vector<double> grad_act(theta_act.size());
    ViewSchedule schedule(views.size(), config.seed);
    const auto t0 = std::chrono::steady_clock::now();

    for (int step = 0; step < config.iterations; ++step) {
        const size_t v = schedule.pick(step);
        const GrayView& gv = views[v];
        const int active_degree =
            std::min(scene.sh_degree, step / config.sh_degree_interval);
        const std::optional<ACTParams> act =
            use_act ? std::optional<ACTParams>(result.act[v]) : std::nullopt;

        const ImageRGB rendered = render_from_cache(*caches[v], scene, act, config.background,
                                                    active_degree, config.threads);
        ImageRGB residual(rendered.width, rendered.height);
        const ImageGray& target = gv.target;
        const double loss = masked_l1(rendered, gv.mask, mask_counts[v],
                                      [&](size_t pix, int) { return target.data[pix]; }, residual);
        if (!std::isfinite(loss))
            throw DivergenceError("grayscale fit loss is not finite", step, gv.camera.id);

        std::fill(grad_sh.begin(), grad_sh.end(), 0.0);
        accumulate_sh_gradient(*caches[v], scene, act, residual, active_degree, config.threads,
                               grad_sh);
        const double lr_dc = decayed_lr(config, step);
        adam_sh.step(grad_sh, theta_sh, [&](size_t i) {
            return (i % n_full) == 0 ? lr_dc : lr_dc / config.sh_rest_lr_div;
        });
        scatter_sh(theta_sh, scene);

        if (use_act) {
            const ACTGradient ag = act_gradient(residual, *caches[v], scene, active_degree);
            std::fill(grad_act.begin(), grad_act.end(), 0.0);
            for (int c = 0; c < 3; ++c) {
                grad_act[v * 6 + c] = ag.w[c];
                grad_act[v * 6 + 3 + c] = ag.b[c];
            }
            adam_act.step(grad_act, theta_act, [&](size_t) { return config.act_lr; });
            for (size_t vv = 0; vv < views.size(); ++vv)
                for (int c = 0; c < 3; ++c) {
                    result.act[vv].w[c] = theta_act[vv * 6 + c];
                    result.act[vv].b[c] = theta_act[vv * 6 + 3 + c];
                }
        }

        TrainLogRow row;
        row.iteration = step;
        row.view_id = gv.camera.id;
        row.loss_total = row.loss_l1 = loss;
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(std::move(row));
        result.final_loss = loss;
    }

    double psnr_sum = 0;
    for (size_t v = 0; v < views.size(); ++v) {
        const std::optional<ACTParams> act =
            use_act ? std::optional<ACTParams>(result.act[v]) : std::nullopt;
        const ImageRGB rendered =
            render_from_cache(*caches[v], scene, act, config.background, -1, config.threads);
        psnr_sum += masked_psnr(rendered, views[v].mask, mask_counts[v], views[v].target);
    }
    result.final_psnr = psnr_sum / static_cast<double>(views.size());
    return result;
}

ColorizeResult colorize(SplatScene& scene, const ColorizeInputs& inputs,
                        const LossWeights& weights, const OptimizerConfig& config) {
    weights.validate();
    config.validate();
    scene.validate();
    const size_t n_refs = inputs.refs.size();
    const size_t n_views = n_refs + inputs.aux.size();
    if (n_views == 0) throw ConfigError("colorize: no views at all");
    if (inputs.feat_downscale < 1) throw ConfigError("colorize: feat_downscale must be >= 1");

    std::vector<size_t> ref_mask_counts(n_refs);
    for (size_t v = 0; v < n_refs; ++v) {
        const ColorizeRefView& rv = inputs.refs[v];
        rv.camera.validate();
        if (rv.target.width != rv.camera.width || rv.target.height != rv.camera.height)
            throw ConfigError("reference view '" + rv.camera.id + "': target size mismatch");
        if (rv.mask.width != rv.camera.width || rv.mask.height != rv.camera.height)
            throw ConfigError("reference view '" + rv.camera.id + "': mask size mismatch");
        ref_mask_counts[v] = rv.mask.count_true();
        if (ref_mask_counts[v] == 0)
            throw ConfigError("reference view '" + rv.camera.id + "': empty mask");
    }
    for (const ColorizeAuxView& av : inputs.aux) {
        av.camera.validate();
        if (weights.lambda_pc > 0 &&
            (av.pseudo.width != av.camera.width || av.pseudo.height != av.camera.height))
            throw ConfigError("view '" + av.camera.id +
                              "' has no pseudo-color map but lambda_pc > 0");
        if ((weights.lambda_tcm > 0 || weights.lambda_cc > 0)) {
            if (av.corr.cells.empty())
                throw ConfigError("view '" + av.camera.id +
                                  "' has no correspondence map but a feature loss is enabled");
            if (inputs.ref_color_feats.empty())
                throw ConfigError("feature losses enabled but no reference color features given");
        }
    }

    RenderOptions ropt;
    ropt.want_cache = true;
    ropt.threads = config.threads;
    ropt.background = config.background;
    std::vector<std::shared_ptr<BlendCache>> caches(n_views);
    for (size_t v = 0; v < n_views; ++v) {
        const CameraView& cam =
            v < n_refs ? inputs.refs[v].camera : inputs.aux[v - n_refs].camera;
        caches[v] = render_view(scene, cam, std::nullopt, ropt).cache;
    }

    std::vector<double> theta_sh;
    gather_sh(scene, theta_sh);
    AdamState adam_sh(theta_sh.size());
    std::vector<double> grad_sh(theta_sh.size());
    const int n_full = scene.sh_coeff_count();
    ViewSchedule schedule(n_views, config.seed);
    ColorizeResult result;
    const auto t0 = std::chrono::steady_clock::now();

    for (int step = 0; step < config.iterations; ++step) {
        const size_t v = schedule.pick(step);
        const bool is_ref = v < n_refs;
        const CameraView& cam = is_ref ? inputs.refs[v].camera : inputs.aux[v - n_refs].camera;

        // Colorization trains every SH degree from the first step.
        const ImageRGB rendered = render_from_cache(*caches[v], scene, std::nullopt,
                                                    config.background, -1, config.threads);
        ImageRGB residual(rendered.width, rendered.height);
        TrainLogRow row;
        row.iteration = step;
        row.view_id = cam.id;

        if (is_ref) {
            const ColorizeRefView& rv = inputs.refs[v];
            const ImageRGB& target = rv.target;
            row.loss_l1 = masked_l1(rendered, rv.mask, ref_mask_counts[v],
                                    [&](size_t pix, int c) { return target.data[pix * 3 + c]; },
                                    residual);
            row.loss_total = row.loss_l1;
        } else {
            const ColorizeAuxView& av = inputs.aux[v - n_refs];
            if (weights.lambda_pc > 0) {
                const PseudoColorLoss pcl = pseudo_color_loss(av.pseudo, rendered);
                row.loss_pc = pcl.loss;
                for (size_t i = 0; i < residual.data.size(); ++i)
                    residual.data[i] += weights.lambda_pc * pcl.grad.data[i];
            }
            if (weights.lambda_tcm > 0 || weights.lambda_cc > 0) {
                const ImageRGB coarse = box_downscale(rendered, inputs.feat_downscale);
                ImageRGB coarse_grad(coarse.width, coarse.height);
                if (weights.lambda_tcm > 0) {
                    const CorrLoss t = tcm_loss(coarse, av.corr, inputs.ref_color_feats);
                    row.loss_tcm = t.loss;
                    for (size_t i = 0; i < coarse_grad.data.size(); ++i)
                        coarse_grad.data[i] += weights.lambda_tcm * t.grad.data[i];
                }
                if (weights.lambda_cc > 0) {
                    const CorrLoss c = ccm_loss(coarse, av.corr, inputs.ref_color_feats);
                    row.loss_cc = c.loss;
                    for (size_t i = 0; i < coarse_grad.data.size(); ++i)
                        coarse_grad.data[i] += weights.lambda_cc * c.grad.data[i];
                }
                const ImageRGB up = box_downscale_adjoint(coarse_grad, rendered.width,
                                                          rendered.height, inputs.feat_downscale);
                for (size_t i = 0; i < residual.data.size(); ++i) residual.data[i] += up.data[i];
            }
            row.loss_total = weights.lambda_pc * row.loss_pc + weights.lambda_tcm * row.loss_tcm +
                             weights.lambda_cc * row.loss_cc;
        }
        if (!std::isfinite(row.loss_total))
            throw DivergenceError("colorization loss is not finite", step, cam.id);

        std::fill(grad_sh.begin(), grad_sh.end(), 0.0);
        accumulate_sh_gradient(*caches[v], scene, std::nullopt, residual, -1, config.threads,
                               grad_sh);
        const double lr_dc = decayed_lr(config, step);
        adam_sh.step(grad_sh, theta_sh, [&](size_t i) {
            return (i % n_full) == 0 ? lr_dc : lr_dc / config.sh_rest_lr_div;
        });
        scatter_sh(theta_sh, scene);

        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.final_loss = row.loss_total;
        result.log.push_back(std::move(row));
    }
    return result;
}

namespace {

struct FDEval {
    double loss = 0;
    ImageRGB residual;
    ACTGradient act_grad;  // only meaningful for kGrayAct
};

FDEval eval_fd_loss(const SplatScene& scene, const FDView& view, FDLossKind kind,
                    const BlendCache& cache, const ACTParams& act, bool want_grad) {
    FDEval out;
    const std::optional<ACTParams> act_opt =
        kind == FDLossKind::kGrayAct ? std::optional<ACTParams>(act) : std::nullopt;
    const ImageRGB rendered =
        render_from_cache(cache, scene, act_opt, Vec3::Zero(), -1, 1);
    out.residual = ImageRGB(rendered.width, rendered.height);

    switch (kind) {
        case FDLossKind::kGrayAct: {
            const size_t n_mask = view.mask.count_true();
            const ImageGray& target = view.gray_target;
            out.loss = masked_l1(rendered, view.mask, n_mask,
                                 [&](size_t pix, int) { return target.data[pix]; }, out.residual);
            if (want_grad) out.act_grad = act_gradient(out.residual, cache, scene, -1);
            break;
        }
        case FDLossKind::kPseudo: {
            const PseudoColorLoss pcl = pseudo_color_loss(view.pseudo, rendered);
            out.loss = pcl.loss;
            out.residual = pcl.grad;
            break;
        }
        case FDLossKind::kTcm:
        case FDLossKind::kCcm: {
            const ImageRGB coarse = box_downscale(rendered, view.feat_downscale);
            const CorrLoss cl = kind == FDLossKind::kTcm
                                    ? tcm_loss(coarse, view.corr, view.ref_color_feats)
                                    : ccm_loss(coarse, view.corr, view.ref_color_feats);
            out.loss = cl.loss;
            out.residual =
                box_downscale_adjoint(cl.grad, rendered.width, rendered.height,
                                      view.feat_downscale);
            break;
        }
        case FDLossKind::kCombined: {
            const LossWeights& w = view.weights;
            if (w.lambda_pc > 0) {
                const PseudoColorLoss pcl = pseudo_color_loss(view.pseudo, rendered);
                out.loss += w.lambda_pc * pcl.loss;
                for (size_t i = 0; i < out.residual.data.size(); ++i)
                    out.residual.data[i] += w.lambda_pc * pcl.grad.data[i];
            }
            if (w.lambda_tcm > 0 || w.lambda_cc > 0) {
                const ImageRGB coarse = box_downscale(rendered, view.feat_downscale);
                ImageRGB cg(coarse.width, coarse.height);
                if (w.lambda_tcm > 0) {
                    const CorrLoss t = tcm_loss(coarse, view.corr, view.ref_color_feats);
                    out.loss += w.lambda_tcm * t.loss;
                    for (size_t i = 0; i < cg.data.size(); ++i)
                        cg.data[i] += w.lambda_tcm * t.grad.data[i];
                }
                if (w.lambda_cc > 0) {
                    const CorrLoss c = ccm_loss(coarse, view.corr, view.ref_color_feats);
                    out.loss += w.lambda_cc * c.loss;
                    for (size_t i = 0; i < cg.data.size(); ++i)
                        cg.data[i] += w.lambda_cc * c.grad.data[i];
                }
                const ImageRGB up = box_downscale_adjoint(cg, rendered.width, rendered.height,
                                                          view.feat_downscale);
                for (size_t i = 0; i < out.residual.data.size(); ++i)
                    out.residual.data[i] += up.data[i];
            }
            break;
        }
    }
    return out;
}

}  // namespace

FDReport finite_difference_check(SplatScene& scene, const FDView& view, FDLossKind kind, double h,
                                 int samples, uint64_t seed) {
    scene.validate();
    view.camera.validate();

    RenderOptions ropt;
    ropt.want_cache = true;
    ropt.threads = 1;
    const auto cache = render_view(scene, view.camera, std::nullopt, ropt).cache;

    ACTParams act = view.act;
    const FDEval base = eval_fd_loss(scene, view, kind, *cache, act, true);

    const int n_full = scene.sh_coeff_count();
    std::vector<double> analytic(sh_param_count(scene), 0.0);
    accumulate_sh_gradient(*cache, scene, kind == FDLossKind::kGrayAct
                                              ? std::optional<ACTParams>(act)
                                              : std::nullopt,
                           base.residual, -1, 1, analytic);

    const size_t sh_params = analytic.size();
    const size_t total_params = sh_params + (kind == FDLossKind::kGrayAct ? 6 : 0);
    std::vector<size_t> pool(std::min<size_t>(total_params, 10000));
    if (pool.size() == total_params) {
        std::iota(pool.begin(), pool.end(), size_t{0});
    } else {
        std::mt19937_64 pick(seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_int_distribution<size_t> uni(0, total_params - 1);
        for (size_t& p : pool) p = uni(pick);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    const size_t n_samples = std::min<size_t>(samples, pool.size());

    FDReport report;
    double rel_sum = 0;
    for (size_t s = 0; s < n_samples; ++s) {
        const size_t p = pool[s];
        double a;  // analytic derivative for this parameter
        double* slot;
        if (p < sh_params) {
            a = analytic[p];
            const size_t g = p / (3 * n_full);
            const size_t rem = p % (3 * n_full);
            slot = &scene.gaussians[g].sh[rem / n_full][rem % n_full];
        } else {
            const size_t q = p - sh_params;
            a = q < 3 ? base.act_grad.w[q] : base.act_grad.b[q - 3];
            slot = q < 3 ? &act.w[q] : &act.b[q - 3];
        }

        const double saved = *slot;
        *slot = saved + h;
        const double lp = eval_fd_loss(scene, view, kind, *cache, act, false).loss;
        *slot = saved - h;
        const double lm = eval_fd_loss(scene, view, kind, *cache, act, false).loss;
        *slot = saved;

        const double fd = (lp - lm) / (2 * h);
        const double dplus = (lp - base.loss) / h;
        const double dminus = (base.loss - lm) / h;
        if (std::abs(dplus - dminus) > 0.05 * (std::abs(dplus) + std::abs(dminus) + 1e-9)) {
            ++report.skipped_kinks;  // central difference straddles a kink
            continue;
        }
        const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-3});
        report.max_rel = std::max(report.max_rel, rel);
        rel_sum += rel;
        ++report.checked;
    }
    if (report.checked > 0) report.mean_rel = rel_sum / report.checked;
    return report;
}

}  // namespace splatcolor
