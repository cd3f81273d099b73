#include "hgm/nets.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hgm {

ImageTensor TrainableModel::score(const ImageTensor& X, double sigma) const {
    if (sigma <= 0.0)
        throw std::invalid_argument("TrainableModel::score: sigma must be positive");
    Workspace ws;
    ImageTensor f = forward(X, ws);
    const double scale = output_scale(sigma);
    for (double& v : f.data) v *= scale;
    return f;
}

namespace {
constexpr int kKernel = 3;
const std::vector<int> kConvDilations = {1, 2, 4, 1};
}  // namespace

ConvScoreNet::ConvScoreNet(int channels, int hidden, std::uint64_t seed)
    : channels_(channels), hidden_(hidden), dilations_(kConvDilations) {
    if (channels_ <= 0 || hidden_ <= 0)
        throw std::invalid_argument("ConvScoreNet: channels and hidden must be positive");
    init_params(seed);
}

ConvScoreNet::ConvScoreNet(const ModelDescriptor& desc)
    : ConvScoreNet(desc.channels, desc.hidden, 0) {
    if (desc.architecture != "conv")
        throw std::invalid_argument("ConvScoreNet: descriptor architecture mismatch");
    if (!desc.dilations.empty() && desc.dilations != dilations_)
        throw std::invalid_argument("ConvScoreNet: unsupported dilation sequence");
}

int ConvScoreNet::layer_in(int layer) const { return layer == 0 ? channels_ : hidden_; }

int ConvScoreNet::layer_out(int layer) const {
    return layer == static_cast<int>(dilations_.size()) - 1 ? channels_ : hidden_;
}

// Parameter layout: for each layer, weights indexed ((o*3 + ky)*3 + kx)*in + i
// (input channel fastest, matching the tensor layout for contiguous inner
// loops), then biases; the learned input-skip scalar sits at the very end.
std::size_t ConvScoreNet::weight_offset(int layer) const {
    std::size_t off = 0;
    for (int l = 0; l < layer; ++l)
        off += static_cast<std::size_t>(layer_out(l)) * layer_in(l) * kKernel * kKernel +
               layer_out(l);
    return off;
}

std::size_t ConvScoreNet::bias_offset(int layer) const {
    return weight_offset(layer) +
           static_cast<std::size_t>(layer_out(layer)) * layer_in(layer) * kKernel * kKernel;
}

void ConvScoreNet::init_params(std::uint64_t seed) {
    const int layers = static_cast<int>(dilations_.size());
    std::size_t total = weight_offset(layers) + 1;  // + input-skip scalar
    params_.assign(total, 0.0);
    Rng rng = make_rng(seed);
    for (int l = 0; l < layers; ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer_in(l)) * kKernel * kKernel);
        std::uniform_real_distribution<double> uniform(-bound, bound);
        const std::size_t begin = weight_offset(l);
        const std::size_t end = bias_offset(l);
        for (std::size_t k = begin; k < end; ++k) params_[k] = uniform(rng);
        // biases stay zero
    }
    // input-skip scalar stays zero so the net starts as a pure conv stack
}

namespace {

// Z(r,c,o) = bias[o] + sum_{ky,kx,i} W[o][ky][kx][i] * A(r+(ky-1)*d, c+(kx-1)*d, i)
// with zero padding outside the image.
void conv_forward(const ImageTensor& A, ImageTensor& Z, const double* weights,
                  const double* bias, int in, int out, int dilation) {
    const int H = A.height, W = A.width;
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            double* z = &Z.data[(static_cast<std::size_t>(r) * W + c) * out];
            for (int o = 0; o < out; ++o) z[o] = bias[o];
            for (int ky = 0; ky < kKernel; ++ky) {
                const int rr = r + (ky - 1) * dilation;
                if (rr < 0 || rr >= H) continue;
                for (int kx = 0; kx < kKernel; ++kx) {
                    const int cc = c + (kx - 1) * dilation;
                    if (cc < 0 || cc >= W) continue;
                    const double* a = &A.data[(static_cast<std::size_t>(rr) * W + cc) * in];
                    for (int o = 0; o < out; ++o) {
                        const double* w = weights + ((static_cast<std::size_t>(o) * kKernel + ky) *
                                                         kKernel + kx) * in;
                        double s = 0.0;
                        for (int i = 0; i < in; ++i) s += w[i] * a[i];
                        z[o] += s;
                    }
                }
            }
        }
    }
}

// Accumulates dW/db into grad slots and, when dA is non-null, the gradient
// with respect to the layer input.
void conv_backward(const ImageTensor& A, const ImageTensor& dZ, const double* weights,
                   double* grad_weights, double* grad_bias, ImageTensor* dA, int in, int out,
                   int dilation) {
    const int H = A.height, W = A.width;
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double* dz = &dZ.data[(static_cast<std::size_t>(r) * W + c) * out];
            for (int o = 0; o < out; ++o) grad_bias[o] += dz[o];
            for (int ky = 0; ky < kKernel; ++ky) {
                const int rr = r + (ky - 1) * dilation;
                if (rr < 0 || rr >= H) continue;
                for (int kx = 0; kx < kKernel; ++kx) {
                    const int cc = c + (kx - 1) * dilation;
                    if (cc < 0 || cc >= W) continue;
                    const std::size_t spot = (static_cast<std::size_t>(rr) * W + cc) * in;
                    const double* a = &A.data[spot];
                    double* da = dA ? &dA->data[spot] : nullptr;
                    for (int o = 0; o < out; ++o) {
                        const double g = dz[o];
                        if (g == 0.0) continue;
                        const std::size_t w_base =
                            ((static_cast<std::size_t>(o) * kKernel + ky) * kKernel + kx) * in;
                        double* gw = grad_weights + w_base;
                        for (int i = 0; i < in; ++i) gw[i] += g * a[i];
                        if (da) {
                            const double* w = weights + w_base;
                            for (int i = 0; i < in; ++i) da[i] += g * w[i];
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

ImageTensor ConvScoreNet::forward(const ImageTensor& X, Workspace& ws) const {
    if (X.channels != channels_)
        throw std::invalid_argument("ConvScoreNet::forward: channel count mismatch");
    const int layers = static_cast<int>(dilations_.size());
    ws.input = X;
    ws.activations.clear();
    ws.activations.reserve(layers - 1);
    ImageTensor current = X;
    for (int l = 0; l < layers; ++l) {
        ImageTensor z(X.height, X.width, layer_out(l));
        conv_forward(current, z, params_.data() + weight_offset(l),
                     params_.data() + bias_offset(l), layer_in(l), layer_out(l), dilations_[l]);
        if (l < layers - 1) {
            for (double& v : z.data) v = std::tanh(v);
            ws.activations.push_back(z);
            current = std::move(z);
        } else {
            current = std::move(z);
        }
    }
    const double alpha = params_.back();
    for (std::size_t k = 0; k < current.data.size(); ++k)
        current.data[k] += alpha * X.data[k];
    return current;
}

void ConvScoreNet::backward(const Workspace& ws, const ImageTensor& dL_df,
                            std::vector<double>& grad) const {
    if (grad.size() != params_.size())
        throw std::invalid_argument("ConvScoreNet::backward: gradient buffer size mismatch");
    const int layers = static_cast<int>(dilations_.size());
    if (static_cast<int>(ws.activations.size()) != layers - 1)
        throw std::invalid_argument("ConvScoreNet::backward: workspace not from forward()");

    // Input-skip scalar: f = conv_stack + alpha * X.
    double dalpha = 0.0;
    for (std::size_t k = 0; k < dL_df.data.size(); ++k)
        dalpha += dL_df.data[k] * ws.input.data[k];
    grad.back() += dalpha;

    ImageTensor dz = dL_df;  // last layer is linear, so dZ = dL/df
    for (int l = layers - 1; l >= 0; --l) {
        const ImageTensor& layer_input = (l == 0) ? ws.input : ws.activations[l - 1];
        if (l == 0) {
            conv_backward(layer_input, dz, params_.data() + weight_offset(l),
                          grad.data() + weight_offset(l), grad.data() + bias_offset(l),
                          nullptr, layer_in(l), layer_out(l), dilations_[l]);
        } else {
            ImageTensor da(layer_input.height, layer_input.width, layer_in(l));
            conv_backward(layer_input, dz, params_.data() + weight_offset(l),
                          grad.data() + weight_offset(l), grad.data() + bias_offset(l),
                          &da, layer_in(l), layer_out(l), dilations_[l]);
            // through tanh: layer_input holds tanh(pre) of layer l-1
            for (std::size_t k = 0; k < da.data.size(); ++k) {
                const double t = layer_input.data[k];
                da.data[k] *= (1.0 - t * t);
            }
            dz = std::move(da);
        }
    }
}

ModelDescriptor ConvScoreNet::descriptor() const {
    ModelDescriptor d;
    d.architecture = "conv";
    d.channels = channels_;
    d.hidden = hidden_;
    d.dilations = dilations_;
    return d;
}

LinearScoreHead::LinearScoreHead(int height, int width, int channels, std::uint64_t seed)
    : height_(height), width_(width), channels_(channels),
      dim_(static_cast<std::size_t>(height) * width * channels) {
    if (height <= 0 || width <= 0 || channels <= 0)
        throw std::invalid_argument("LinearScoreHead: dimensions must be positive");
    params_.assign(dim_ * dim_ + dim_, 0.0);
    Rng rng = make_rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim_));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (std::size_t k = 0; k < dim_ * dim_; ++k) params_[k] = uniform(rng);
    // bias stays zero
}

LinearScoreHead::LinearScoreHead(const ModelDescriptor& desc)
    : LinearScoreHead(desc.height, desc.width, desc.channels, 0) {
    if (desc.architecture != "linear")
        throw std::invalid_argument("LinearScoreHead: descriptor architecture mismatch");
}

ImageTensor LinearScoreHead::forward(const ImageTensor& X, Workspace& ws) const {
    if (X.size() != dim_)
        throw std::invalid_argument("LinearScoreHead::forward: shape mismatch");
    ws.input = X;
    ws.activations.clear();
    ImageTensor f(X.height, X.width, X.channels);
    for (std::size_t i = 0; i < dim_; ++i) {
        const double* row = &params_[i * dim_];
        double s = params_[dim_ * dim_ + i];  // bias
        for (std::size_t j = 0; j < dim_; ++j) s += row[j] * X.data[j];
        f.data[i] = s;
    }
    return f;
}

void LinearScoreHead::backward(const Workspace& ws, const ImageTensor& dL_df,
                               std::vector<double>& grad) const {
    if (grad.size() != params_.size())
        throw std::invalid_argument("LinearScoreHead::backward: gradient buffer size mismatch");
    for (std::size_t i = 0; i < dim_; ++i) {
        const double g = dL_df.data[i];
        if (g == 0.0) continue;
        double* row = &grad[i * dim_];
        for (std::size_t j = 0; j < dim_; ++j) row[j] += g * ws.input.data[j];
        grad[dim_ * dim_ + i] += g;
    }
}

ModelDescriptor LinearScoreHead::descriptor() const {
    ModelDescriptor d;
    d.architecture = "linear";
    d.height = height_;
    d.width = width_;
    d.channels = channels_;
    return d;
}

double LinearScoreHead::matrix_entry(std::size_t i, std::size_t j) const {
    return params_[i * dim_ + j];
}

double LinearScoreHead::bias_entry(std::size_t i) const { return params_[dim_ * dim_ + i]; }

std::unique_ptr<TrainableModel> make_model(const ModelDescriptor& desc) {
    if (desc.architecture == "conv") return std::make_unique<ConvScoreNet>(desc);
    if (desc.architecture == "linear") return std::make_unique<LinearScoreHead>(desc);
    throw std::invalid_argument("make_model: unknown architecture '" + desc.architecture + "'");
}

}  // namespace hgm
