#pragma once

#include <Eigen/Dense>

#include "hgm/score.hpp"
#include "hgm/tensor.hpp"

namespace hgm {

/// Zero-mean, unit-variance field with separable exponential correlation
/// cov(f[r][c], f[r'][c']) = rho^|r-r'| * rho^|c-c'|, built exactly by
/// running the first-order recursion along rows and then columns.
ImageTensor sample_ar1_field(int height, int width, double rho, Rng& rng);

/// The matching covariance matrix over flattened (row-major) pixels of a
/// single-channel image: entry ((r,c),(r',c')) = rho^(|r-r'| + |c-c'|).
Eigen::MatrixXd ar1_covariance(int height, int width, double rho);

/// Parameters of the in-tree synthetic image family: a shared
/// "luminance" field plus small per-channel deviations, all AR(1)
/// correlated. With channels == 1 only the shared field is used.
struct SyntheticConfig {
    int height = 16;
    int width = 16;
    int channels = 3;
    double mean = 0.5;
    double luma_std = 0.12;
    double chroma_std = 0.015;
    double rho_luma = 0.85;
    double rho_chroma = 0.95;
    bool clamp_to_unit = false;  // keep false when exact Gaussianity matters
};

ImageTensor sample_synthetic_image(const SyntheticConfig& cfg, Rng& rng);

/// mean + std * f with f an AR(1) field; the single-channel Gaussian whose
/// covariance ar1_covariance describes (scaled by std^2).
ImageTensor sample_correlated_gaussian(int height, int width, double mean, double std_dev,
                                       double rho, Rng& rng);

/// Exact posterior mean of a Gaussian given exact observations on the
/// mask's support: observed entries return y, missing ones
/// mu_M + S_MO S_OO^{-1} (y_O - mu_O), via a dense solve.
ImageTensor gaussian_conditional_mean(const GaussianSpec& prior, const ImageTensor& y,
                                      const ImageTensor& mask);

}  // namespace hgm
