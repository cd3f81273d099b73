#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgm {

/// Rank-3 image/latent tensor with row-major (row, column, channel) layout.
/// Values are double precision and unconstrained; clamping to [0,1] happens
/// only at image export.
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(int h, int w, int c, double fill = 0.0);

    double& at(int r, int c, int ch) {
        return data[static_cast<std::size_t>((r * width + c) * channels + ch)];
    }
    double at(int r, int c, int ch) const {
        return data[static_cast<std::size_t>((r * width + c) * channels + ch)];
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const ImageTensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
    std::string shape_string() const;
};

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* where);

/// Throws std::runtime_error if the tensor contains NaN or Inf.
void assert_finite(const ImageTensor& t, const char* where);

ImageTensor clamp01(const ImageTensor& t);

double min_value(const ImageTensor& t);
double max_value(const ImageTensor& t);
double mean_value(const ImageTensor& t);
/// Population variance over all entries.
double variance_value(const ImageTensor& t);
double squared_norm(const ImageTensor& t);
/// Mean of squared entrywise differences.
double mean_squared_error(const ImageTensor& a, const ImageTensor& b);
double max_abs_difference(const ImageTensor& a, const ImageTensor& b);

using Rng = std::mt19937_64;

/// Deterministically derives an independent generator from (seed, stream).
/// Separate streams keep draw sequences of independent pipeline stages
/// decoupled so that disabling one stage does not shift another's draws.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Fills with i.i.d. standard normal draws. A fresh distribution is used per
/// call so the number of raw engine draws depends only on the element count.
void fill_normal(ImageTensor& t, Rng& rng);
/// Fills with i.i.d. uniform draws on [0,1).
void fill_uniform(ImageTensor& t, Rng& rng);

ImageTensor normal_like(const ImageTensor& t, Rng& rng);

}  // namespace hgm
