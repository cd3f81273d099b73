#include "hgm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hgm {

double psnr(const ImageTensor& candidate, const ImageTensor& reference) {
    require_same_shape(candidate, reference, "psnr");
    const double peak = max_value(reference);
    if (peak <= 0.0)
        throw std::invalid_argument("psnr: reference peak must be positive");
    const double mse = mean_squared_error(candidate, reference);
    if (mse < 1e-19 * peak * peak) return kPsnrCap;
    const double value = 20.0 * std::log10(peak / std::sqrt(mse));
    return std::min(value, kPsnrCap);
}

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (k1 * dynamic_range)^2 with range 1
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_window() {
    std::vector<double> w(kWindow * kWindow);
    const int half = kWindow / 2;
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        for (int j = 0; j < kWindow; ++j) {
            const double di = i - half;
            const double dj = j - half;
            const double v = std::exp(-(di * di + dj * dj) / (2.0 * kWindowSigma * kWindowSigma));
            w[i * kWindow + j] = v;
            total += v;
        }
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

double ssim(const ImageTensor& candidate, const ImageTensor& reference) {
    require_same_shape(candidate, reference, "ssim");
    if (reference.height < kWindow || reference.width < kWindow)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    static const std::vector<double> window = gaussian_window();
    const int half = kWindow / 2;
    double channel_sum = 0.0;
    for (int ch = 0; ch < reference.channels; ++ch) {
        double score_sum = 0.0;
        long window_count = 0;
        for (int r = half; r < reference.height - half; ++r) {
            for (int c = half; c < reference.width - half; ++c) {
                double mu_x = 0.0, mu_y = 0.0;
                double xx = 0.0, yy = 0.0, xy = 0.0;
                for (int i = 0; i < kWindow; ++i) {
                    for (int j = 0; j < kWindow; ++j) {
                        const double w = window[i * kWindow + j];
                        const double x = candidate.at(r + i - half, c + j - half, ch);
                        const double y = reference.at(r + i - half, c + j - half, ch);
                        mu_x += w * x;
                        mu_y += w * y;
                        xx += w * x * x;
                        yy += w * y * y;
                        xy += w * x * y;
                    }
                }
                const double var_x = xx - mu_x * mu_x;
                const double var_y = yy - mu_y * mu_y;
                const double cov = xy - mu_x * mu_y;
                const double num = (2.0 * mu_x * mu_y + kC1) * (2.0 * cov + kC2);
                const double den = (mu_x * mu_x + mu_y * mu_y + kC1) * (var_x + var_y + kC2);
                score_sum += num / den;
                ++window_count;
            }
        }
        channel_sum += score_sum / static_cast<double>(window_count);
    }
    return channel_sum / reference.channels;
}

MetricReport compare_images(const ImageTensor& candidate, const ImageTensor& reference) {
    MetricReport report;
    report.psnr_db = psnr(candidate, reference);
    report.ssim = ssim(candidate, reference);
    return report;
}

}  // namespace hgm
