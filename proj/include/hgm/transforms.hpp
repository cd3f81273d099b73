#pragma once

#include <array>
#include <string_view>

#include "hgm/tensor.hpp"

namespace hgm {

enum class TransformKind { Identity, Copy, Pool, Dwt };

const char* to_string(TransformKind kind);
TransformKind transform_kind_from_string(std::string_view name);

/// Invertible high-dimensionalization map.
///   Copy:  (H, W, C) -> (H, W, 2C), channel-axis duplication.
///   Pool:  (H, W, C) -> (H/2, W/2, 4C), polyphase (checkerboard) split.
///   Dwt:   (H, W, C) -> (H/2, W/2, 4C), single-level orthonormal Haar.
///   Identity: shape preserving.
/// Pool and Dwt require even spatial dimensions.
struct HighDimTransform {
    TransformKind kind = TransformKind::Identity;
};

std::array<int, 3> forward_shape(int height, int width, int channels, TransformKind kind);

ImageTensor h_forward(const ImageTensor& x, const HighDimTransform& t);
ImageTensor h_inverse(const ImageTensor& X, const HighDimTransform& t);

}  // namespace hgm
