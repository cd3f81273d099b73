#pragma once

#include <string>
#include <string_view>

#include "hgm/tensor.hpp"
#include "hgm/transforms.hpp"

namespace hgm {

enum class MaskKind { Bayer, Block, Random, FromFile };

const char* to_string(MaskKind kind);
MaskKind mask_kind_from_string(std::string_view name);

/// Binary diagonal degradation operator y = M x + e. Mask entries are
/// exactly 0 or 1, so M is idempotent and self-adjoint.
struct DegradationOp {
    ImageTensor mask;
    MaskKind kind = MaskKind::Random;
    double noise_std = 0.0;  // observation noise e; zero in all stock tasks

    std::size_t observed_count() const;
};

/// RGGB Bayer color filter array over a 3-channel image: in each 2x2 cell,
/// (0,0) keeps R, (0,1) and (1,0) keep G, (1,1) keeps B.
DegradationOp bayer_mask(int height, int width);

/// Keeps each pixel location (all channels together) independently with
/// probability keep_fraction.
DegradationOp random_mask(int height, int width, int channels, double keep_fraction, Rng& rng);

/// Zeroes a centered rectangle with side lengths floor(sqrt(coverage) * H)
/// and floor(sqrt(coverage) * W) across all channels.
DegradationOp block_mask(int height, int width, int channels, double coverage);

/// Loads an 8-bit PNG; nonzero luminance marks a kept pixel, broadcast
/// across the requested channel count.
DegradationOp load_mask(const std::string& path, int channels);

/// y = mask .* x + noise_std * z restricted to kept entries.
ImageTensor apply(const DegradationOp& op, const ImageTensor& x, Rng& rng);

/// Closed-form data-fidelity step: with h = h_inverse(X, t), observed
/// entries become (lambda * y + h) / (lambda + 1) and unobserved entries
/// stay at h. This is the exact minimizer of
///   lambda * |y - M x|^2 + |x - h|^2
/// for binary diagonal M.
ImageTensor data_fidelity_update(const ImageTensor& X, const ImageTensor& y,
                                 const DegradationOp& op, double lambda,
                                 const HighDimTransform& t);

/// Classic bilinear demosaicking of an RGGB observation; the comparison
/// baseline for learned restoration.
ImageTensor bilinear_demosaick(const ImageTensor& y);

}  // namespace hgm
