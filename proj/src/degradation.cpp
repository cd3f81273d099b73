#include "hgm/degradation.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>

#include "hgm/png_io.hpp"

namespace hgm {

const char* to_string(MaskKind kind) {
    switch (kind) {
        case MaskKind::Bayer: return "bayer";
        case MaskKind::Block: return "block";
        case MaskKind::Random: return "random";
        case MaskKind::FromFile: return "file";
    }
    throw std::logic_error("unknown mask kind");
}

MaskKind mask_kind_from_string(std::string_view name) {
    if (name == "bayer") return MaskKind::Bayer;
    if (name == "block") return MaskKind::Block;
    if (name == "random") return MaskKind::Random;
    if (name == "file") return MaskKind::FromFile;
    throw std::invalid_argument("unknown mask kind: " + std::string(name));
}

std::size_t DegradationOp::observed_count() const {
    std::size_t n = 0;
    for (double m : mask.data) n += (m != 0.0) ? 1 : 0;
    return n;
}

DegradationOp bayer_mask(int height, int width) {
    if (height <= 0 || width <= 0)
        throw std::invalid_argument("bayer_mask: dimensions must be positive");
    if (height % 2 != 0 || width % 2 != 0)
        throw std::invalid_argument("bayer_mask: height and width must be even");
    DegradationOp op;
    op.kind = MaskKind::Bayer;
    op.mask = ImageTensor(height, width, 3);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const bool even_row = (r % 2 == 0);
            const bool even_col = (c % 2 == 0);
            int kept;
            if (even_row && even_col) kept = 0;        // R
            else if (!even_row && !even_col) kept = 2; // B
            else kept = 1;                             // G
            op.mask.at(r, c, kept) = 1.0;
        }
    }
    return op;
}

DegradationOp random_mask(int height, int width, int channels, double keep_fraction, Rng& rng) {
    if (height <= 0 || width <= 0 || channels <= 0)
        throw std::invalid_argument("random_mask: dimensions must be positive");
    if (keep_fraction <= 0.0 || keep_fraction > 1.0)
        throw std::invalid_argument("random_mask: keep_fraction must lie in (0, 1]");
    DegradationOp op;
    op.kind = MaskKind::Random;
    op.mask = ImageTensor(height, width, channels);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double kept = (unit(rng) < keep_fraction) ? 1.0 : 0.0;
            for (int ch = 0; ch < channels; ++ch) op.mask.at(r, c, ch) = kept;
        }
    }
    return op;
}

DegradationOp block_mask(int height, int width, int channels, double coverage) {
    if (height <= 0 || width <= 0 || channels <= 0)
        throw std::invalid_argument("block_mask: dimensions must be positive");
    if (coverage <= 0.0 || coverage >= 1.0)
        throw std::invalid_argument("block_mask: coverage must lie in (0, 1)");
    DegradationOp op;
    op.kind = MaskKind::Block;
    op.mask = ImageTensor(height, width, channels);
    std::fill(op.mask.data.begin(), op.mask.data.end(), 1.0);
    const double side = std::sqrt(coverage);
    const int block_h = static_cast<int>(std::floor(side * height));
    const int block_w = static_cast<int>(std::floor(side * width));
    const int r0 = (height - block_h) / 2;
    const int c0 = (width - block_w) / 2;
    for (int r = r0; r < r0 + block_h; ++r)
        for (int c = c0; c < c0 + block_w; ++c)
            for (int ch = 0; ch < channels; ++ch) op.mask.at(r, c, ch) = 0.0;
    return op;
}

DegradationOp load_mask(const std::string& path, int channels) {
    if (channels <= 0) throw std::invalid_argument("load_mask: channels must be positive");
    const ImageTensor img = load_png(path);
    DegradationOp op;
    op.kind = MaskKind::FromFile;
    op.mask = ImageTensor(img.height, img.width, channels);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double luminance = 0.0;
            for (int ch = 0; ch < img.channels; ++ch) luminance += img.at(r, c, ch);
            const double kept = (luminance > 0.0) ? 1.0 : 0.0;
            for (int ch = 0; ch < channels; ++ch) op.mask.at(r, c, ch) = kept;
        }
    }
    return op;
}

ImageTensor apply(const DegradationOp& op, const ImageTensor& x, Rng& rng) {
    require_same_shape(op.mask, x, "apply(degradation)");
    ImageTensor y(x.height, x.width, x.channels);
    if (op.noise_std == 0.0) {
        for (std::size_t i = 0; i < x.data.size(); ++i)
            y.data[i] = op.mask.data[i] * x.data[i];
        return y;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        if (op.mask.data[i] != 0.0)
            y.data[i] = x.data[i] + op.noise_std * gauss(rng);
    }
    return y;
}

ImageTensor data_fidelity_update(const ImageTensor& X, const ImageTensor& y,
                                 const DegradationOp& op, double lambda,
                                 const HighDimTransform& t) {
    if (lambda < 0.0)
        throw std::invalid_argument("data_fidelity_update: lambda must be non-negative");
    ImageTensor h = h_inverse(X, t);
    require_same_shape(op.mask, h, "data_fidelity_update");
    require_same_shape(y, h, "data_fidelity_update");
    ImageTensor out(h.height, h.width, h.channels);
    for (std::size_t i = 0; i < h.data.size(); ++i) {
        if (op.mask.data[i] != 0.0)
            out.data[i] = (lambda * y.data[i] + h.data[i]) / (lambda + 1.0);
        else
            out.data[i] = h.data[i];
    }
    return out;
}

namespace {

// Averages the available neighbors of (r, c) in channel ch, restricted to
// positions the Bayer pattern actually observed for that channel.
double neighbor_average(const ImageTensor& y, const ImageTensor& mask,
                        int r, int c, int ch, const int (*offsets)[2], int count) {
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < count; ++k) {
        const int rr = r + offsets[k][0];
        const int cc = c + offsets[k][1];
        if (rr < 0 || rr >= y.height || cc < 0 || cc >= y.width) continue;
        if (mask.at(rr, cc, ch) == 0.0) continue;
        sum += y.at(rr, cc, ch);
        ++n;
    }
    return (n > 0) ? sum / n : 0.0;
}

}  // namespace

ImageTensor bilinear_demosaick(const ImageTensor& y) {
    if (y.channels != 3)
        throw std::invalid_argument("bilinear_demosaick: expected a 3-channel observation");
    const DegradationOp op = bayer_mask(y.height, y.width);
    static const int kCross[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    static const int kDiag[4][2] = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    static const int kAll[8][2] = {{-1, 0}, {1, 0},  {0, -1}, {0, 1},
                                   {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    ImageTensor out(y.height, y.width, 3);
    for (int r = 0; r < y.height; ++r) {
        for (int c = 0; c < y.width; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                if (op.mask.at(r, c, ch) != 0.0) {
                    out.at(r, c, ch) = y.at(r, c, ch);
                    continue;
                }
                if (ch == 1) {
                    // Green is missing only at R/B sites; its four cross
                    // neighbors are all green samples.
                    out.at(r, c, ch) = neighbor_average(y, op.mask, r, c, ch, kCross, 4);
                    continue;
                }
                const bool even_row = (r % 2 == 0);
                const bool even_col = (c % 2 == 0);
                const bool at_opposite = (ch == 0) ? (!even_row && !even_col)
                                                   : (even_row && even_col);
                if (at_opposite) {
                    // R at a B site (or B at an R site): diagonal neighbors.
                    out.at(r, c, ch) = neighbor_average(y, op.mask, r, c, ch, kDiag, 4);
                } else {
                    // R or B at a G site: the two same-row or same-column
                    // samples; using all eight neighbors with masking picks
                    // exactly those.
                    out.at(r, c, ch) = neighbor_average(y, op.mask, r, c, ch, kAll, 8);
                }
            }
        }
    }
    return out;
}

}  // namespace hgm
