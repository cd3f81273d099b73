#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "hgm/score.hpp"
#include "hgm/sweep.hpp"
#include "hgm/synthetic.hpp"
#include "hgm/tensor.hpp"

using namespace hgm;

TEST_CASE("ar1 covariance matrix") {
    const int h = 3, w = 4;
    const Eigen::MatrixXd C = ar1_covariance(h, w, 0.9);
    REQUIRE(C.rows() == h * w);
    REQUIRE(C.cols() == h * w);

    SUBCASE("entries follow the separable exponential law") {
        for (int r1 = 0; r1 < h; ++r1)
            for (int c1 = 0; c1 < w; ++c1)
                for (int r2 = 0; r2 < h; ++r2)
                    for (int c2 = 0; c2 < w; ++c2) {
                        const double expected =
                            std::pow(0.9, std::abs(r1 - r2) + std::abs(c1 - c2));
                        CHECK(C(r1 * w + c1, r2 * w + c2) ==
                              doctest::Approx(expected).epsilon(1e-12));
                    }
    }
    SUBCASE("symmetric positive definite with unit diagonal") {
        CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < C.rows(); ++i) CHECK(C(i, i) == 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("ar1 field sampling matches its covariance") {
    // Estimate a few covariance entries from many independent fields and
    // compare with the closed form. Standard error ~ 1/sqrt(trials).
    const int trials = 20000;
    Rng rng = make_rng(99);
    double sum_var = 0.0;        // variance at (1,1)
    double sum_row = 0.0;        // cov((1,1),(1,2)) -> rho
    double sum_diag = 0.0;       // cov((1,1),(2,2)) -> rho^2
    for (int t = 0; t < trials; ++t) {
        const ImageTensor f = sample_ar1_field(4, 4, 0.8, rng);
        sum_var += f.at(1, 1, 0) * f.at(1, 1, 0);
        sum_row += f.at(1, 1, 0) * f.at(1, 2, 0);
        sum_diag += f.at(1, 1, 0) * f.at(2, 2, 0);
    }
    CHECK(sum_var / trials == doctest::Approx(1.0).epsilon(0.05));
    CHECK(sum_row / trials == doctest::Approx(0.8).epsilon(0.05));
    CHECK(sum_diag / trials == doctest::Approx(0.64).epsilon(0.08));
}

TEST_CASE("correlated gaussian sampler moments") {
    const int trials = 8000;
    Rng rng = make_rng(7);
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ImageTensor x = sample_correlated_gaussian(4, 4, 0.5, 0.1, 0.9, rng);
        const double v = x.at(2, 2, 0);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / trials;
    const double var = sum_sq / trials - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("synthetic image family") {
    SyntheticConfig cfg;
    cfg.height = 8;
    cfg.width = 8;
    cfg.channels = 3;

    SUBCASE("deterministic for equal generators") {
        Rng r1 = make_rng(5, 10);
        Rng r2 = make_rng(5, 10);
        const ImageTensor a = sample_synthetic_image(cfg, r1);
        const ImageTensor b = sample_synthetic_image(cfg, r2);
        CHECK(max_abs_difference(a, b) == 0.0);
        CHECK(a.height == 8);
        CHECK(a.channels == 3);
    }
    SUBCASE("channels share the luminance field") {
        // chroma_std << luma_std, so cross-channel correlation is high.
        Rng rng = make_rng(6);
        double cross = 0.0, var_r = 0.0, var_g = 0.0;
        const int trials = 2000;
        for (int t = 0; t < trials; ++t) {
            const ImageTensor x = sample_synthetic_image(cfg, rng);
            const double r = x.at(4, 4, 0) - 0.5;
            const double g = x.at(4, 4, 1) - 0.5;
            cross += r * g;
            var_r += r * r;
            var_g += g * g;
        }
        const double corr = cross / std::sqrt(var_r * var_g);
        CHECK(corr > 0.9);
    }
    SUBCASE("clamped variant stays inside the unit range") {
        SyntheticConfig clamped = cfg;
        clamped.clamp_to_unit = true;
        Rng rng = make_rng(8);
        for (int t = 0; t < 50; ++t) {
            const ImageTensor x = sample_synthetic_image(clamped, rng);
            CHECK(min_value(x) >= 0.0);
            CHECK(max_value(x) <= 1.0);
        }
    }
}

TEST_CASE("gaussian conditional mean") {
    SUBCASE("observed entries are returned exactly") {
        GaussianSpec spec;
        spec.mean = ImageTensor(3, 3, 1, 0.5);
        spec.covariance = 0.25 * ar1_covariance(3, 3, 0.7);
        ImageTensor mask(3, 3, 1, 0.0);
        mask.at(0, 0, 0) = 1.0;
        mask.at(1, 2, 0) = 1.0;
        mask.at(2, 1, 0) = 1.0;
        ImageTensor y(3, 3, 1, 0.0);
        y.at(0, 0, 0) = 0.9;
        y.at(1, 2, 0) = 0.2;
        y.at(2, 1, 0) = 0.7;
        const ImageTensor m = gaussian_conditional_mean(spec, y, mask);
        CHECK(m.at(0, 0, 0) == 0.9);
        CHECK(m.at(1, 2, 0) == 0.2);
        CHECK(m.at(2, 1, 0) == 0.7);
    }
    SUBCASE("1x3 chain interpolates with the stationary weights") {
        // For a zero-mean AR(1) chain x0, x1, x2 with corr rho, observing
        // x0 and x2 gives E[x1 | x0, x2] = rho/(1+rho^2) * (x0 + x2):
        // solve [[1, rho^2], [rho^2, 1]] a = [rho, rho].
        const double rho = 0.6;
        GaussianSpec spec;
        spec.mean = ImageTensor(1, 3, 1, 0.0);
        spec.covariance = ar1_covariance(1, 3, rho);
        ImageTensor mask(1, 3, 1, 1.0);
        mask.at(0, 1, 0) = 0.0;
        ImageTensor y(1, 3, 1, 0.0);
        y.at(0, 0, 0) = 1.0;
        y.at(0, 2, 0) = -0.4;
        const ImageTensor m = gaussian_conditional_mean(spec, y, mask);
        const double expected = rho / (1.0 + rho * rho) * (1.0 - 0.4);
        CHECK(m.at(0, 1, 0) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("a nonzero mean shifts unobserved predictions") {
        GaussianSpec spec;
        spec.mean = ImageTensor(1, 3, 1, 0.5);
        spec.covariance = 0.01 * ar1_covariance(1, 3, 0.6);
        ImageTensor mask(1, 3, 1, 1.0);
        mask.at(0, 1, 0) = 0.0;
        ImageTensor y = spec.mean;  // observe exactly the mean
        y.at(0, 1, 0) = 0.0;
        const ImageTensor m = gaussian_conditional_mean(spec, y, mask);
        CHECK(m.at(0, 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("sample-count sweep is deterministic and well-formed") {
    SampleSweepConfig cfg;
    cfg.sample_counts = {20, 60};
    cfg.seeds = 2;
    cfg.heldout_count = 200;
    cfg.iterations_coarse = 150;
    cfg.iterations_fine = 100;
    cfg.batch_size = 16;
    cfg.seed = 4;

    const std::vector<SampleSweepRow> rows = sample_count_sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sample_count == 20);
    CHECK(rows[1].sample_count == 60);
    for (const SampleSweepRow& row : rows) {
        REQUIRE(row.per_seed_errors.size() == 2);
        double acc = 0.0;
        for (double e : row.per_seed_errors) {
            CHECK(e >= 0.0);
            CHECK(std::isfinite(e));
            acc += e;
        }
        CHECK(row.mean_heldout_error == doctest::Approx(acc / 2).epsilon(1e-12));
    }

    const std::vector<SampleSweepRow> again = sample_count_sweep(cfg);
    REQUIRE(again.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].mean_heldout_error == again[i].mean_heldout_error);
}

TEST_CASE("transform sweep produces one row per transform") {
    TransformSweepConfig cfg;
    cfg.kinds = {TransformKind::Identity, TransformKind::Pool};
    cfg.height = 8;
    cfg.width = 8;
    cfg.restorations = 2;
    cfg.schedule = make_noise_schedule(0.5, 0.02, 4, 2e-5, 15);
    cfg.seed = 9;

    const std::vector<TransformSweepRow> rows = transform_sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].kind == TransformKind::Identity);
    CHECK(rows[1].kind == TransformKind::Pool);
    for (const TransformSweepRow& row : rows) {
        CHECK(row.mean_abs_error >= 0.0);
        CHECK(row.max_abs_error >= row.mean_abs_error);
        CHECK(std::isfinite(row.psnr_restored));
        // Restoration should beat the raw masked observation by a wide margin.
        CHECK(row.psnr_restored > row.psnr_observed);
    }
}
