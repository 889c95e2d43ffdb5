#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatcolor/corr_losses.hpp"
#include "splatcolor/pseudo_color.hpp"
#include "splatcolor/renderer.hpp"
#include "splatcolor/types.hpp"

namespace splatcolor {

struct LossWeights {
    double lambda_pc = 1.0;
    double lambda_tcm = 0.1;
    double lambda_cc = 0.05;

    // Throws InvalidInputError when a weight is negative or all are zero.
    void validate() const;
};

struct OptimizerConfig {
    int iterations = 2000;
    double sh_lr = 0.0025;            // DC coefficient rate
    double sh_rest_lr_div = 20.0;     // higher-degree coefficients run at sh_lr / this
    double sh_lr_final_scale = 0.1;   // exponential decay target multiplier at the last step
    double act_lr = 1e-4;
    int sh_degree_interval = 1000;    // grayscale fit: active degree grows every N steps
    uint64_t seed = 0;
    bool deterministic = true;        // reductions merge in fixed order (always honored)
    int threads = 0;
    Vec3 background = Vec3::Zero();

    void validate() const;  // iterations > 0, rates > 0
};

struct TrainLogRow {
    int iteration = 0;
    std::string view_id;
    double loss_total = 0;
    double loss_l1 = 0;
    double loss_pc = 0;
    double loss_tcm = 0;
    double loss_cc = 0;
    double wall_seconds = 0;  // cumulative
};

void write_train_log_csv(const std::vector<TrainLogRow>& rows, const std::string& path);

// Flat per-parameter first/second moment step rule (decay 0.9 / 0.999,
// epsilon 1e-15, bias-corrected). One instance owns one parameter block.
class AdamState {
public:
    explicit AdamState(size_t size) : m_(size, 0.0), v_(size, 0.0) {}

    // params -= lr(i) * corrected_step(grad[i]); every parameter advances
    // every call, zero gradients included.
    template <typename LrFn>
    void step(const std::vector<double>& grad, std::vector<double>& params, LrFn lr) {
        ++t_;
        const double c1 = 1.0 - std::pow(kBeta1, t_);
        const double c2 = 1.0 - std::pow(kBeta2, t_);
        for (size_t i = 0; i < params.size(); ++i) {
            m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
            v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
            const double mhat = m_[i] / c1;
            const double vhat = v_[i] / c2;
            params[i] -= lr(i) * mhat / (std::sqrt(vhat) + kEps);
        }
    }

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-15;

private:
    std::vector<double> m_, v_;
    int t_ = 0;
};

// SH gradient of a pixel loss through the blend cache: for every cached
// contribution (pixel p, gaussian g, weight w) and channel c with the zero
// clamp disengaged, grad_sh[g][c][m] += residual[p][c] * act_gain_c * w *
// Y_m(dir_p) for m below the active coefficient count. `grad` is laid out
// gaussian-major, (g*3 + channel)*n_coeffs_full + m, and is accumulated into.
void accumulate_sh_gradient(const BlendCache& cache, const SplatScene& scene,
                            const std::optional<ACTParams>& act, const ImageRGB& residual,
                            int active_degree, int threads, std::vector<double>& grad);

// --- Stage 1: grayscale appearance fitting -------------------------------

struct GrayView {
    CameraView camera;
    ImageGray target;
    ImageMask mask;
};

struct FitGrayResult {
    std::vector<ACTParams> act;  // one per view, view order
    std::vector<TrainLogRow> log;
    double final_loss = 0;
    double final_psnr = 0;  // masked, mean over views, with fitted ACT applied
};

// Minimizes masked mean L1 between ACT-rendered views and grayscale targets
// over SH coefficients and per-view ACT parameters. Geometry and opacity stay
// untouched; blend caches are built once up front. With use_act = false the
// per-view parameters stay identity and receive no updates.
// Throws DivergenceError when the loss turns non-finite.
FitGrayResult fit_grayscale(SplatScene& scene, const std::vector<GrayView>& views,
                            const OptimizerConfig& config, bool use_act = true,
                            double act_sigma = 0.01);

// --- Stage 2: colorization ------------------------------------------------

struct ColorizeRefView {
    CameraView camera;
    ImageRGB target;  // colorized reference image
    ImageMask mask;
};

struct ColorizeAuxView {
    CameraView camera;
    PseudoColorMap pseudo;   // required when lambda_pc > 0
    CorrespondenceMap corr;  // required when lambda_tcm or lambda_cc > 0
};

struct ColorizeInputs {
    std::vector<ColorizeRefView> refs;
    std::vector<ColorizeAuxView> aux;
    // Patch-mean descriptors of the coarse reference color images, aligned
    // with the reference order used at matching time.
    std::vector<FeatureMap> ref_color_feats;
    int feat_downscale = 4;
};

struct ColorizeResult {
    std::vector<TrainLogRow> log;
    double final_loss = 0;
};

// Second-stage optimization of SH coefficients only (every degree at once, no
// ACT): reference views contribute masked L1 at full resolution, the others
// the weighted pseudo-color / feature / patch-color losses, with the feature
// losses evaluated on box-downscaled renders.
// Throws ConfigError on inconsistent inputs (no refs and all weights zero, a
// positive weight without its required maps), DivergenceError on NaN loss.
ColorizeResult colorize(SplatScene& scene, const ColorizeInputs& inputs,
                        const LossWeights& weights, const OptimizerConfig& config);

// --- Gradient verification ------------------------------------------------

enum class FDLossKind { kGrayAct, kPseudo, kTcm, kCcm, kCombined };

struct FDView {
    CameraView camera;
    ImageGray gray_target;   // kGrayAct
    ImageMask mask;
    ACTParams act;           // kGrayAct: transform under test
    PseudoColorMap pseudo;   // kPseudo / kCombined
    CorrespondenceMap corr;  // kTcm / kCcm / kCombined
    std::vector<FeatureMap> ref_color_feats;
    LossWeights weights;     // kCombined
    int feat_downscale = 4;
};

struct FDReport {
    double max_rel = 0;
    double mean_rel = 0;
    int checked = 0;
    int skipped_kinks = 0;  // samples where one-sided differences disagree
};

// Samples SH coefficients (and ACT parameters for kGrayAct), compares the
// analytic gradient against central differences of the cached-render loss,
// and reports relative errors |a - fd| / max(|a|, |fd|, 1e-3). Samples that
// straddle an L1 or clamp kink are detected by disagreeing one-sided
// differences and skipped. The scene is restored to its input state.
FDReport finite_difference_check(SplatScene& scene, const FDView& view, FDLossKind kind,
                                 double h = 1e-4, int samples = 200, uint64_t seed = 0);

}  // namespace splatcolor
