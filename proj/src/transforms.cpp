#include "hgm/transforms.hpp"

#include <stdexcept>
#include <string>

namespace hgm {

const char* to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::Identity: return "identity";
        case TransformKind::Copy: return "copy";
        case TransformKind::Pool: return "pool";
        case TransformKind::Dwt: return "dwt";
    }
    return "unknown";
}

TransformKind transform_kind_from_string(std::string_view name) {
    if (name == "identity") return TransformKind::Identity;
    if (name == "copy") return TransformKind::Copy;
    if (name == "pool") return TransformKind::Pool;
    if (name == "dwt") return TransformKind::Dwt;
    throw std::invalid_argument("unknown transform kind: " + std::string(name));
}

std::array<int, 3> forward_shape(int height, int width, int channels, TransformKind kind) {
    switch (kind) {
        case TransformKind::Identity:
            return {height, width, channels};
        case TransformKind::Copy:
            return {height, width, 2 * channels};
        case TransformKind::Pool:
        case TransformKind::Dwt:
            if (height % 2 != 0 || width % 2 != 0) {
                throw std::invalid_argument("forward_shape: pool/dwt require even spatial dimensions");
            }
            return {height / 2, width / 2, 4 * channels};
    }
    throw std::invalid_argument("forward_shape: bad kind");
}

namespace {

void require_even_spatial(const ImageTensor& x, const char* where) {
    if (x.height % 2 != 0 || x.width % 2 != 0) {
        throw std::invalid_argument(std::string(where) + ": even height and width required, got " +
                                    x.shape_string());
    }
}

ImageTensor copy_forward(const ImageTensor& x) {
    ImageTensor out(x.height, x.width, 2 * x.channels);
    const int c = x.channels;
    for (int r = 0; r < x.height; ++r) {
        for (int col = 0; col < x.width; ++col) {
            for (int ch = 0; ch < c; ++ch) {
                const double v = x.at(r, col, ch);
                out.at(r, col, ch) = v;
                out.at(r, col, c + ch) = v;
            }
        }
    }
    return out;
}

ImageTensor copy_inverse(const ImageTensor& X) {
    if (X.channels % 2 != 0) {
        throw std::invalid_argument("h_inverse(copy): channel count must be even");
    }
    const int c = X.channels / 2;
    ImageTensor out(X.height, X.width, c);
    for (int r = 0; r < X.height; ++r) {
        for (int col = 0; col < X.width; ++col) {
            for (int ch = 0; ch < c; ++ch) {
                out.at(r, col, ch) = 0.5 * (X.at(r, col, ch) + X.at(r, col, c + ch));
            }
        }
    }
    return out;
}

// Sub-image k (k = 0..3) samples row parity k/2 and column parity k%2.
ImageTensor pool_forward(const ImageTensor& x) {
    require_even_spatial(x, "h_forward(pool)");
    const int oh = x.height / 2, ow = x.width / 2, c = x.channels;
    ImageTensor out(oh, ow, 4 * c);
    for (int r = 0; r < oh; ++r) {
        for (int col = 0; col < ow; ++col) {
            for (int k = 0; k < 4; ++k) {
                const int sr = 2 * r + k / 2;
                const int sc = 2 * col + k % 2;
                for (int ch = 0; ch < c; ++ch) {
                    out.at(r, col, k * c + ch) = x.at(sr, sc, ch);
                }
            }
        }
    }
    return out;
}

ImageTensor pool_inverse(const ImageTensor& X) {
    if (X.channels % 4 != 0) {
        throw std::invalid_argument("h_inverse(pool): channel count must be divisible by 4");
    }
    const int c = X.channels / 4;
    ImageTensor out(2 * X.height, 2 * X.width, c);
    for (int r = 0; r < X.height; ++r) {
        for (int col = 0; col < X.width; ++col) {
            for (int k = 0; k < 4; ++k) {
                const int dr = 2 * r + k / 2;
                const int dc = 2 * col + k % 2;
                for (int ch = 0; ch < c; ++ch) {
                    out.at(dr, dc, ch) = X.at(r, col, k * c + ch);
                }
            }
        }
    }
    return out;
}

// Single-level 2-D Haar with orthonormal taps. On each 2x2 block
// [[a,b],[c,d]] the band matrix is (1/2)[[1,1,1,1],[1,1,-1,-1],
// [1,-1,1,-1],[1,-1,-1,1]], a symmetric orthogonal involution, so the
// inverse applies the same combination. Bands stack as {LL, LH, HL, HH}.
ImageTensor dwt_forward(const ImageTensor& x) {
    require_even_spatial(x, "h_forward(dwt)");
    const int oh = x.height / 2, ow = x.width / 2, c = x.channels;
    ImageTensor out(oh, ow, 4 * c);
    for (int r = 0; r < oh; ++r) {
        for (int col = 0; col < ow; ++col) {
            for (int ch = 0; ch < c; ++ch) {
                const double a = x.at(2 * r, 2 * col, ch);
                const double b = x.at(2 * r, 2 * col + 1, ch);
                const double cc = x.at(2 * r + 1, 2 * col, ch);
                const double d = x.at(2 * r + 1, 2 * col + 1, ch);
                out.at(r, col, 0 * c + ch) = 0.5 * (a + b + cc + d);
                out.at(r, col, 1 * c + ch) = 0.5 * (a + b - cc - d);
                out.at(r, col, 2 * c + ch) = 0.5 * (a - b + cc - d);
                out.at(r, col, 3 * c + ch) = 0.5 * (a - b - cc + d);
            }
        }
    }
    return out;
}

ImageTensor dwt_inverse(const ImageTensor& X) {
    if (X.channels % 4 != 0) {
        throw std::invalid_argument("h_inverse(dwt): channel count must be divisible by 4");
    }
    const int c = X.channels / 4;
    ImageTensor out(2 * X.height, 2 * X.width, c);
    for (int r = 0; r < X.height; ++r) {
        for (int col = 0; col < X.width; ++col) {
            for (int ch = 0; ch < c; ++ch) {
                const double ll = X.at(r, col, 0 * c + ch);
                const double lh = X.at(r, col, 1 * c + ch);
                const double hl = X.at(r, col, 2 * c + ch);
                const double hh = X.at(r, col, 3 * c + ch);
                out.at(2 * r, 2 * col, ch) = 0.5 * (ll + lh + hl + hh);
                out.at(2 * r, 2 * col + 1, ch) = 0.5 * (ll + lh - hl - hh);
                out.at(2 * r + 1, 2 * col, ch) = 0.5 * (ll - lh + hl - hh);
                out.at(2 * r + 1, 2 * col + 1, ch) = 0.5 * (ll - lh - hl + hh);
            }
        }
    }
    return out;
}

}  // namespace

ImageTensor h_forward(const ImageTensor& x, const HighDimTransform& t) {
    switch (t.kind) {
        case TransformKind::Identity: return x;
        case TransformKind::Copy: return copy_forward(x);
        case TransformKind::Pool: return pool_forward(x);
        case TransformKind::Dwt: return dwt_forward(x);
    }
    throw std::invalid_argument("h_forward: bad kind");
}

ImageTensor h_inverse(const ImageTensor& X, const HighDimTransform& t) {
    switch (t.kind) {
        case TransformKind::Identity: return X;
        case TransformKind::Copy: return copy_inverse(X);
        case TransformKind::Pool: return pool_inverse(X);
        case TransformKind::Dwt: return dwt_inverse(X);
    }
    throw std::invalid_argument("h_inverse: bad kind");
}

}  // namespace hgm
