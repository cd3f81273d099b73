#include "hgm/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hgm {

namespace {

void ar1_rows(ImageTensor& f, double rho) {
    const double blend = std::sqrt(1.0 - rho * rho);
    for (int r = 0; r < f.height; ++r) {
        for (int c = 1; c < f.width; ++c)
            f.at(r, c, 0) = rho * f.at(r, c - 1, 0) + blend * f.at(r, c, 0);
    }
}

void ar1_cols(ImageTensor& f, double rho) {
    const double blend = std::sqrt(1.0 - rho * rho);
    for (int r = 1; r < f.height; ++r) {
        for (int c = 0; c < f.width; ++c)
            f.at(r, c, 0) = rho * f.at(r - 1, c, 0) + blend * f.at(r, c, 0);
    }
}

}  // namespace

ImageTensor sample_ar1_field(int height, int width, double rho, Rng& rng) {
    if (height <= 0 || width <= 0)
        throw std::invalid_argument("sample_ar1_field: dimensions must be positive");
    if (rho < 0.0 || rho >= 1.0)
        throw std::invalid_argument("sample_ar1_field: rho must lie in [0, 1)");
    ImageTensor f(height, width, 1);
    fill_normal(f, rng);
    ar1_rows(f, rho);
    ar1_cols(f, rho);
    return f;
}

Eigen::MatrixXd ar1_covariance(int height, int width, double rho) {
    const int d = height * width;
    Eigen::MatrixXd cov(d, d);
    for (int r1 = 0; r1 < height; ++r1)
        for (int c1 = 0; c1 < width; ++c1)
            for (int r2 = 0; r2 < height; ++r2)
                for (int c2 = 0; c2 < width; ++c2)
                    cov(r1 * width + c1, r2 * width + c2) =
                        std::pow(rho, std::abs(r1 - r2) + std::abs(c1 - c2));
    return cov;
}

ImageTensor sample_synthetic_image(const SyntheticConfig& cfg, Rng& rng) {
    const ImageTensor luma = sample_ar1_field(cfg.height, cfg.width, cfg.rho_luma, rng);
    ImageTensor img(cfg.height, cfg.width, cfg.channels);
    for (int ch = 0; ch < cfg.channels; ++ch) {
        ImageTensor chroma(1, 1, 1);
        const bool with_chroma = cfg.channels > 1 && cfg.chroma_std > 0.0;
        if (with_chroma)
            chroma = sample_ar1_field(cfg.height, cfg.width, cfg.rho_chroma, rng);
        for (int r = 0; r < cfg.height; ++r) {
            for (int c = 0; c < cfg.width; ++c) {
                double v = cfg.mean + cfg.luma_std * luma.at(r, c, 0);
                if (with_chroma) v += cfg.chroma_std * chroma.at(r, c, 0);
                img.at(r, c, ch) = v;
            }
        }
    }
    if (cfg.clamp_to_unit) img = clamp01(img);
    return img;
}

ImageTensor sample_correlated_gaussian(int height, int width, double mean, double std_dev,
                                       double rho, Rng& rng) {
    ImageTensor f = sample_ar1_field(height, width, rho, rng);
    for (double& v : f.data) v = mean + std_dev * v;
    return f;
}

ImageTensor gaussian_conditional_mean(const GaussianSpec& prior, const ImageTensor& y,
                                      const ImageTensor& mask) {
    require_same_shape(prior.mean, y, "gaussian_conditional_mean");
    require_same_shape(prior.mean, mask, "gaussian_conditional_mean");
    std::vector<Eigen::Index> observed, missing;
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        if (mask.data[i] != 0.0)
            observed.push_back(static_cast<Eigen::Index>(i));
        else
            missing.push_back(static_cast<Eigen::Index>(i));
    }
    if (observed.empty())
        throw std::invalid_argument("gaussian_conditional_mean: mask observes nothing");

    ImageTensor out = y;
    if (missing.empty()) return out;

    const auto no = static_cast<Eigen::Index>(observed.size());
    const auto nm = static_cast<Eigen::Index>(missing.size());
    Eigen::MatrixXd cov_oo(no, no);
    Eigen::MatrixXd cov_mo(nm, no);
    Eigen::VectorXd delta_o(no);
    for (Eigen::Index a = 0; a < no; ++a) {
        delta_o[a] = y.data[static_cast<std::size_t>(observed[a])] -
                     prior.mean.data[static_cast<std::size_t>(observed[a])];
        for (Eigen::Index b = 0; b < no; ++b)
            cov_oo(a, b) = prior.covariance(observed[a], observed[b]);
        for (Eigen::Index m = 0; m < nm; ++m)
            cov_mo(m, a) = prior.covariance(missing[m], observed[a]);
    }
    const Eigen::VectorXd posterior =
        cov_mo * Eigen::LLT<Eigen::MatrixXd>(cov_oo).solve(delta_o);
    for (Eigen::Index m = 0; m < nm; ++m)
        out.data[static_cast<std::size_t>(missing[m])] =
            prior.mean.data[static_cast<std::size_t>(missing[m])] + posterior[m];
    return out;
}

}  // namespace hgm
