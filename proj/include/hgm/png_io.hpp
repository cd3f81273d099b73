#pragma once

#include <string>

#include "hgm/tensor.hpp"

namespace hgm {

/// Loads an 8-bit PNG as a tensor with values in [0,1] (divided by 255).
/// Grayscale maps to 1 channel, color to 3 channels; alpha is stripped and
/// palette/16-bit inputs are converted.
ImageTensor load_png(const std::string& path);

/// Writes a PNG with round(255 * clamp(x, 0, 1)). Requires 1 or 3 channels.
/// Output bytes depend only on the pixel data.
void save_png(const std::string& path, const ImageTensor& image);

}  // namespace hgm
