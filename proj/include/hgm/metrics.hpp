#pragma once

#include "hgm/tensor.hpp"

namespace hgm {

/// PSNR values are capped here so that exact reconstructions report a
/// finite number.
inline constexpr double kPsnrCap = 99.0;

/// Peak signal-to-noise ratio in dB with the peak taken from the
/// reference image: 20 log10(max(reference) / sqrt(MSE)). Returns kPsnrCap
/// for (numerically) exact matches and never exceeds it.
double psnr(const ImageTensor& candidate, const ImageTensor& reference);

/// Mean structural similarity with an 11x11 Gaussian window (std 1.5),
/// computed over fully interior windows, dynamic range 1, averaged over
/// channels. Stabilizers: c1 = 0.01^2, c2 = 0.03^2. Symmetric in its
/// arguments.
double ssim(const ImageTensor& candidate, const ImageTensor& reference);

struct MetricReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

MetricReport compare_images(const ImageTensor& candidate, const ImageTensor& reference);

}  // namespace hgm
