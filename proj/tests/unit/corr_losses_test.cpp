#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "oracles.hpp"
#include "splatcolor/corr_losses.hpp"
#include "splatcolor/errors.hpp"

using namespace splatcolor;

namespace {

ImageRGB random_rgb(int w, int h, uint64_t seed, double lo = 0.05, double hi = 1.0) {
    ImageRGB img(w, h);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (double& v : img.data) v = u(rng);
    return img;
}

// Identity correspondences onto a single reference with the same grid.
CorrespondenceMap identity_corr(int width, int height, int patch, int stride) {
    FeatureGrid g = feature_grid(width, height, patch, stride);
    CorrespondenceMap map;
    map.height_f = g.height_f;
    map.width_f = g.width_f;
    map.patch = patch;
    map.stride = stride;
    for (int i = 0; i < g.height_f; ++i)
        for (int j = 0; j < g.width_f; ++j) map.cells.push_back({0, i, j, 0.0});
    return map;
}

void check_fd(const ImageRGB& rendered, const CorrLoss& out,
              const std::function<double(const ImageRGB&)>& loss_fn) {
    double h = 1e-6;
    for (size_t k = 0; k < rendered.data.size(); k += 11) {
        ImageRGB up = rendered;
        up.data[k] += h;
        ImageRGB down = rendered;
        down.data[k] -= h;
        double fd = (loss_fn(up) - loss_fn(down)) / (2 * h);
        CHECK(out.grad.data[k] == doctest::Approx(fd).epsilon(5e-4));
    }
}

}  // namespace

TEST_SUITE("corr_losses") {

TEST_CASE("feature-space loss vanishes when rendered hues match the guidance") {
    ImageRGB rendered = random_rgb(8, 8, 1);
    FeatureMap guide = extract_patch_means(rendered, 4, 2);
    CorrespondenceMap corr = identity_corr(8, 8, 4, 2);
    CorrLoss out = tcm_loss(rendered, corr, {guide});
    CHECK(out.cells == 9);
    CHECK(out.loss == doctest::Approx(0.0).epsilon(1e-12));
    // At the cosine minimum the gradient is orthogonal to f and nearly zero
    // along it; the analytic value at dist = 0 collapses to the zero vector.
    for (double g : out.grad.data) CHECK(std::abs(g) < 1e-9);
}

TEST_CASE("feature-space loss is invariant to guidance scale but not hue") {
    ImageRGB rendered = random_rgb(8, 8, 2);
    FeatureMap guide = extract_patch_means(rendered, 4, 4);
    CorrespondenceMap corr = identity_corr(8, 8, 4, 4);

    FeatureMap scaled = guide;
    for (double& v : scaled.data) v *= 7.0;
    CorrLoss a = tcm_loss(rendered, corr, {guide});
    CorrLoss b = tcm_loss(rendered, corr, {scaled});
    CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));

    FeatureMap hue = guide;
    std::swap(hue.data[0], hue.data[2]);  // rotate one cell's rgb
    CorrLoss c = tcm_loss(rendered, corr, {hue});
    CHECK(c.loss > a.loss + 1e-6);
}

TEST_CASE("feature-space loss equals the mean cosine distance by hand") {
    // One cell; constant rendered patch so its mean is the pixel color.
    ImageRGB rendered(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) rendered.set(x, y, Vec3(0.6, 0.0, 0.0));
    FeatureMap guide;
    guide.height_f = 1;
    guide.width_f = 1;
    guide.dim = 3;
    guide.patch = 4;
    guide.stride = 4;
    guide.data = {0.5, 0.5, 0.0};
    CorrespondenceMap corr = identity_corr(4, 4, 4, 4);
    CorrLoss out = tcm_loss(rendered, corr, {guide});
    CHECK(out.loss == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("feature-space gradient matches finite differences") {
    ImageRGB rendered = random_rgb(12, 8, 3);
    std::vector<FeatureMap> guides = {extract_patch_means(random_rgb(12, 8, 4), 4, 2)};
    CorrespondenceMap corr = identity_corr(12, 8, 4, 2);
    // Scatter the matches around the reference grid for a nontrivial case.
    std::mt19937_64 rng(5);
    for (auto& c : corr.cells) {
        c.i = int(rng() % guides[0].height_f);
        c.j = int(rng() % guides[0].width_f);
    }
    CorrLoss out = tcm_loss(rendered, corr, guides);
    check_fd(rendered, out, [&](const ImageRGB& img) { return tcm_loss(img, corr, guides).loss; });
}

TEST_CASE("zero descriptors contribute distance one with a flat gradient") {
    ImageRGB rendered(4, 4);  // all-black render: zero patch mean
    FeatureMap guide;
    guide.height_f = 1;
    guide.width_f = 1;
    guide.dim = 3;
    guide.patch = 4;
    guide.stride = 4;
    guide.data = {0.2, 0.3, 0.4};
    CorrespondenceMap corr = identity_corr(4, 4, 4, 4);
    CorrLoss out = tcm_loss(rendered, corr, {guide});
    CHECK(out.loss == doctest::Approx(1.0));
    for (double g : out.grad.data) CHECK(g == 0.0);

    // And symmetrically for a zero guidance vector.
    ImageRGB lit = random_rgb(4, 4, 6);
    guide.data = {0.0, 0.0, 0.0};
    CorrLoss out2 = tcm_loss(lit, corr, {guide});
    CHECK(out2.loss == doctest::Approx(1.0));
    for (double g : out2.grad.data) CHECK(g == 0.0);
}

TEST_CASE("patch-agreement loss is the mean squared mean-color gap on the disjoint sub-grid") {
    // patch 4, stride 2: the sub-grid visits every second cell, so patches
    // tile the image without overlap.
    ImageRGB rendered = random_rgb(8, 8, 7);
    FeatureMap guide = extract_patch_means(random_rgb(8, 8, 8), 4, 2);
    CorrespondenceMap corr = identity_corr(8, 8, 4, 2);
    CorrLoss out = ccm_loss(rendered, corr, {guide});
    CHECK(out.cells == 4);  // cells (0,0) (0,2) (2,0) (2,2)

    double expect = 0;
    for (int i : {0, 2})
        for (int j : {0, 2}) {
            Vec3 mean = Vec3::Zero();
            for (int dy = 0; dy < 4; ++dy)
                for (int dx = 0; dx < 4; ++dx) mean += rendered.at(j * 2 + dx, i * 2 + dy);
            mean /= 16.0;
            auto g = guide.cell(i, j);
            expect += (mean - Vec3(g[0], g[1], g[2])).squaredNorm();
        }
    CHECK(out.loss == doctest::Approx(expect / 4.0).epsilon(1e-12));
}

TEST_CASE("patch-agreement gradient matches finite differences") {
    ImageRGB rendered = random_rgb(12, 8, 9);
    std::vector<FeatureMap> guides = {extract_patch_means(random_rgb(12, 8, 10), 4, 2)};
    CorrespondenceMap corr = identity_corr(12, 8, 4, 2);
    std::mt19937_64 rng(11);
    for (auto& c : corr.cells) {
        c.i = int(rng() % guides[0].height_f);
        c.j = int(rng() % guides[0].width_f);
    }
    CorrLoss out = ccm_loss(rendered, corr, guides);
    check_fd(rendered, out, [&](const ImageRGB& img) { return ccm_loss(img, corr, guides).loss; });
}

TEST_CASE("patch-agreement loss vanishes exactly at the matched colors") {
    ImageRGB rendered = random_rgb(8, 8, 12);
    FeatureMap guide = extract_patch_means(rendered, 4, 2);
    CorrespondenceMap corr = identity_corr(8, 8, 4, 2);
    CorrLoss out = ccm_loss(rendered, corr, {guide});
    CHECK(out.loss == doctest::Approx(0.0).epsilon(1e-12));
    for (double g : out.grad.data) CHECK(std::abs(g) < 1e-12);
}

TEST_CASE("patch not a multiple of stride leaves no disjoint sub-grid") {
    ImageRGB rendered = random_rgb(10, 10, 13);
    FeatureMap guide = extract_patch_means(rendered, 4, 3);
    CorrespondenceMap corr = identity_corr(10, 10, 4, 3);
    CHECK_THROWS_WITH_AS(ccm_loss(rendered, corr, {guide}),
                         doctest::Contains("patch grid misalignment"), InvalidInputError);
    // The feature-space loss has no such constraint.
    CHECK_NOTHROW(tcm_loss(rendered, corr, {guide}));
}

TEST_CASE("grid and reference validation") {
    ImageRGB rendered = random_rgb(8, 8, 14);
    FeatureMap guide = extract_patch_means(rendered, 4, 2);
    CorrespondenceMap corr = identity_corr(8, 8, 4, 2);

    ImageRGB wrong_size = random_rgb(12, 12, 15);
    CHECK_THROWS_AS(tcm_loss(wrong_size, corr, {guide}), InvalidInputError);
    CHECK_THROWS_AS(ccm_loss(wrong_size, corr, {guide}), InvalidInputError);

    FeatureMap gray_dim = guide;
    gray_dim.dim = 16;  // not a color mean
    CHECK_THROWS_AS(tcm_loss(rendered, corr, {gray_dim}), InvalidInputError);

    CorrespondenceMap out_of_range = corr;
    out_of_range.cells[0].ref = 3;
    CHECK_THROWS_AS(tcm_loss(rendered, out_of_range, {guide}), InvalidInputError);
    CorrespondenceMap bad_cell = corr;
    bad_cell.cells[0].i = 99;
    CHECK_THROWS_AS(ccm_loss(rendered, bad_cell, {guide}), InvalidInputError);
}

}  // TEST_SUITE
