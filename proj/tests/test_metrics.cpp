#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hgm/metrics.hpp"
#include "hgm/tensor.hpp"
#include "test_support.hpp"

using namespace hgm;

namespace {

/// Independent structural-similarity reference: same published constants,
/// but written brute-force with centered (two-pass) moments and on-the-fly
/// window weights so it shares no code with the library implementation.
double naive_ssim(const ImageTensor& a, const ImageTensor& b) {
    const int win = 11;
    const int half = win / 2;
    const double sigma = 1.5;
    const double c1 = 0.0001;
    const double c2 = 0.0009;

    auto weight = [&](int i, int j) {
        const double di = i - half;
        const double dj = j - half;
        return std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
    };
    double weight_total = 0.0;
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) weight_total += weight(i, j);

    double per_channel_total = 0.0;
    for (int ch = 0; ch < a.channels; ++ch) {
        double acc = 0.0;
        int windows = 0;
        for (int r = 0; r + win <= a.height; ++r) {
            for (int c = 0; c + win <= a.width; ++c) {
                double mu_a = 0.0, mu_b = 0.0;
                for (int i = 0; i < win; ++i)
                    for (int j = 0; j < win; ++j) {
                        const double w = weight(i, j) / weight_total;
                        mu_a += w * a.at(r + i, c + j, ch);
                        mu_b += w * b.at(r + i, c + j, ch);
                    }
                double var_a = 0.0, var_b = 0.0, cov = 0.0;
                for (int i = 0; i < win; ++i)
                    for (int j = 0; j < win; ++j) {
                        const double w = weight(i, j) / weight_total;
                        const double da = a.at(r + i, c + j, ch) - mu_a;
                        const double db = b.at(r + i, c + j, ch) - mu_b;
                        var_a += w * da * da;
                        var_b += w * db * db;
                        cov += w * da * db;
                    }
                acc += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                       ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
                ++windows;
            }
        }
        per_channel_total += acc / windows;
    }
    return per_channel_total / a.channels;
}

}  // namespace

TEST_CASE("psnr hand values") {
    SUBCASE("uniform error of 0.1 against a unit-peak image is 20 dB") {
        ImageTensor reference(8, 8, 3, 1.0);
        ImageTensor candidate(8, 8, 3, 0.9);
        CHECK(psnr(candidate, reference) == doctest::Approx(20.0).epsilon(1e-9));
    }
    SUBCASE("uniform error of 0.01 is 40 dB") {
        ImageTensor reference(8, 8, 1, 1.0);
        ImageTensor candidate(8, 8, 1, 0.99);
        CHECK(psnr(candidate, reference) == doctest::Approx(40.0).epsilon(1e-9));
    }
    SUBCASE("identical images hit the cap exactly") {
        Rng rng = make_rng(3);
        ImageTensor image(5, 7, 3);
        fill_uniform(image, rng);
        image.data[0] = 1.0;  // make the peak positive and well defined
        CHECK(psnr(image, image) == kPsnrCap);
    }
    SUBCASE("near-identical images are capped rather than exceeding 99 dB") {
        ImageTensor reference(8, 8, 1, 1.0);
        ImageTensor candidate(8, 8, 1, 1.0 - 1e-9);
        CHECK(psnr(candidate, reference) == kPsnrCap);
    }
    SUBCASE("the peak comes from the reference argument") {
        ImageTensor reference(4, 4, 1, 2.0);
        ImageTensor candidate(4, 4, 1, 0.5);
        const double expected = 20.0 * std::log10(2.0 / 1.5);
        CHECK(psnr(candidate, reference) == doctest::Approx(expected).epsilon(1e-12));
        // Swapping the arguments changes the peak, so the value changes too.
        const double swapped = 20.0 * std::log10(0.5 / 1.5);
        CHECK(psnr(reference, candidate) == doctest::Approx(swapped).epsilon(1e-12));
    }
    SUBCASE("validation") {
        ImageTensor zero(4, 4, 1, 0.0);
        ImageTensor other(4, 4, 1, 0.5);
        CHECK_THROWS_AS(psnr(other, zero), std::invalid_argument);
        ImageTensor wrong(4, 5, 1, 0.5);
        CHECK_THROWS_AS(psnr(wrong, other), std::invalid_argument);
    }
}

TEST_CASE("ssim") {
    SUBCASE("identical images score exactly one") {
        Rng rng = make_rng(11);
        ImageTensor image(16, 13, 3);
        fill_uniform(image, rng);
        CHECK(ssim(image, image) == 1.0);
    }
    SUBCASE("matches the brute-force reference on random images") {
        Rng rng = make_rng(21);
        for (int trial = 0; trial < 4; ++trial) {
            const int h = 11 + 3 * trial;
            const int w = 11 + 2 * trial;
            const int c = 1 + (trial % 3);
            ImageTensor a(h, w, c);
            ImageTensor b(h, w, c);
            fill_uniform(a, rng);
            fill_uniform(b, rng);
            CAPTURE(trial);
            CHECK(std::abs(ssim(a, b) - naive_ssim(a, b)) <= 1e-10);
        }
    }
    SUBCASE("matches the reference on a correlated pair at the minimum size") {
        Rng rng = make_rng(22);
        ImageTensor a(11, 11, 1);
        fill_uniform(a, rng);
        ImageTensor b = a;
        for (std::size_t i = 0; i < b.size(); i += 3) b.data[i] = 1.0 - b.data[i];
        CHECK(std::abs(ssim(a, b) - naive_ssim(a, b)) <= 1e-10);
        CHECK(ssim(a, b) < 0.999);
    }
    SUBCASE("symmetric in its arguments") {
        // The windowed covariance accumulates (w*a)*b, so exchanging the
        // arguments reorders one rounding; symmetry holds to rounding only.
        Rng rng = make_rng(23);
        ImageTensor a(14, 12, 2);
        ImageTensor b(14, 12, 2);
        fill_uniform(a, rng);
        fill_uniform(b, rng);
        CHECK(std::abs(ssim(a, b) - ssim(b, a)) <= 1e-12);
    }
    SUBCASE("validation") {
        ImageTensor small(10, 32, 1, 0.5);
        CHECK_THROWS_AS(ssim(small, small), std::invalid_argument);
        ImageTensor narrow(32, 10, 1, 0.5);
        CHECK_THROWS_AS(ssim(narrow, narrow), std::invalid_argument);
        ImageTensor a(12, 12, 1, 0.5);
        ImageTensor b(12, 12, 2, 0.5);
        CHECK_THROWS_AS(ssim(a, b), std::invalid_argument);
    }
}

TEST_CASE("compare_images bundles both metrics") {
    Rng rng = make_rng(31);
    ImageTensor reference(16, 16, 3);
    fill_uniform(reference, rng);
    ImageTensor candidate = reference;
    for (double& v : candidate.data) v = 0.9 * v + 0.05;
    const MetricReport report = compare_images(candidate, reference);
    CHECK(report.psnr_db == psnr(candidate, reference));
    CHECK(report.ssim == ssim(candidate, reference));
}
