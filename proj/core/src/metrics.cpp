#include "splatcolor/metrics.hpp"

#include <cmath>
#include <vector>

#include "splatcolor/errors.hpp"

namespace splatcolor {
namespace {

void check_sizes(const ImageRGB& a, const ImageRGB& b, const ImageMask* mask) {
    if (a.width != b.width || a.height != b.height)
        throw InvalidInputError("image size mismatch");
    if (mask && (mask->width != a.width || mask->height != a.height))
        throw InvalidInputError("mask size mismatch");
}

}  // namespace

double psnr(const ImageRGB& a, const ImageRGB& b, const ImageMask* mask) {
    check_sizes(a, b, mask);
    double se = 0.0;
    size_t n = 0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            if (mask && !mask->at(x, y)) continue;
            const double* pa = a.px(x, y);
            const double* pb = b.px(x, y);
            for (int c = 0; c < 3; ++c) {
                double d = pa[c] - pb[c];
                se += d * d;
            }
            ++n;
        }
    }
    if (n == 0) throw InvalidInputError("mask selects no pixels");
    double mse = se / (3.0 * n);
    if (mse <= 0.0) return 100.0;
    return std::min(100.0, -10.0 * std::log10(mse));
}

double ssim(const ImageRGB& a, const ImageRGB& b, const ImageMask* mask) {
    check_sizes(a, b, mask);
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    if (a.width < kWin || a.height < kWin)
        throw InvalidInputError("image smaller than the SSIM window");

    // Normalized Gaussian window.
    double w[kWin][kWin];
    double wsum = 0.0;
    for (int dy = 0; dy < kWin; ++dy)
        for (int dx = 0; dx < kWin; ++dx) {
            double rx = dx - kWin / 2, ry = dy - kWin / 2;
            w[dy][dx] = std::exp(-(rx * rx + ry * ry) / (2.0 * kSigma * kSigma));
            wsum += w[dy][dx];
        }
    for (int dy = 0; dy < kWin; ++dy)
        for (int dx = 0; dx < kWin; ++dx) w[dy][dx] /= wsum;

    ImageGray la = to_luminance(a);
    ImageGray lb = to_luminance(b);

    double total = 0.0;
    size_t n_windows = 0;
    for (int y = 0; y + kWin <= a.height; ++y) {
        for (int x = 0; x + kWin <= a.width; ++x) {
            if (mask && !mask->at(x + kWin / 2, y + kWin / 2)) continue;
            double mu_a = 0, mu_b = 0;
            for (int dy = 0; dy < kWin; ++dy)
                for (int dx = 0; dx < kWin; ++dx) {
                    mu_a += w[dy][dx] * la.at(x + dx, y + dy);
                    mu_b += w[dy][dx] * lb.at(x + dx, y + dy);
                }
            double var_a = 0, var_b = 0, cov = 0;
            for (int dy = 0; dy < kWin; ++dy)
                for (int dx = 0; dx < kWin; ++dx) {
                    double da = la.at(x + dx, y + dy) - mu_a;
                    double db = lb.at(x + dx, y + dy) - mu_b;
                    var_a += w[dy][dx] * da * da;
                    var_b += w[dy][dx] * db * db;
                    cov += w[dy][dx] * da * db;
                }
            double num = (2 * mu_a * mu_b + kC1) * (2 * cov + kC2);
            double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            total += num / den;
            ++n_windows;
        }
    }
    if (n_windows == 0) throw InvalidInputError("mask selects no SSIM windows");
    return total / n_windows;
}

}  // namespace splatcolor
