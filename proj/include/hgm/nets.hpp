#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hgm/score.hpp"
#include "hgm/tensor.hpp"

namespace hgm {

/// Scratch space for a forward pass, kept outside the model so that a
/// frozen model can evaluate many inputs concurrently.
struct Workspace {
    ImageTensor input;
    std::vector<ImageTensor> activations;
};

/// Serializable architecture summary; enough to rebuild the model (up to
/// parameter values) from a checkpoint.
struct ModelDescriptor {
    std::string architecture;  // "conv" or "linear"
    int height = 0;            // linear head: expected shape; conv: 0 (any)
    int width = 0;
    int channels = 0;
    int hidden = 0;                // conv only
    std::vector<int> dilations;    // conv only
};

/// A parametric score model trained by denoising score matching. The
/// network computes a raw field f(X); the reported score is
/// output_scale(sigma) * f(X), which is how noise-level conditioning is
/// injected without widening the architecture.
class TrainableModel : public ScoreModel {
public:
    virtual std::vector<double>& params() = 0;
    virtual const std::vector<double>& params() const = 0;
    virtual double output_scale(double sigma) const = 0;

    /// Computes f(X), recording intermediates needed by backward().
    virtual ImageTensor forward(const ImageTensor& X, Workspace& ws) const = 0;

    /// Accumulates d(loss)/d(params) into grad given dL/df from the most
    /// recent forward() recorded in ws. grad must have params().size()
    /// entries.
    virtual void backward(const Workspace& ws, const ImageTensor& dL_df,
                          std::vector<double>& grad) const = 0;

    virtual ModelDescriptor descriptor() const = 0;

    /// output_scale(sigma) * f(X); requires sigma > 0.
    ImageTensor score(const ImageTensor& X, double sigma) const override;
};

/// Four convolutional layers (3x3 kernels, zero 'same' padding equal to
/// the dilation, dilations 1-2-4-1, tanh between layers) mapping C
/// channels to a hidden width and back, plus a learned scalar skip from
/// the input: f(X) = conv_stack(X) + alpha * X. Conditioning divides the
/// output by sigma. Weights start uniform with fan-in scaling, biases and
/// alpha at zero.
class ConvScoreNet : public TrainableModel {
public:
    ConvScoreNet(int channels, int hidden, std::uint64_t seed);
    explicit ConvScoreNet(const ModelDescriptor& desc);

    std::vector<double>& params() override { return params_; }
    const std::vector<double>& params() const override { return params_; }
    double output_scale(double sigma) const override { return 1.0 / sigma; }
    ImageTensor forward(const ImageTensor& X, Workspace& ws) const override;
    void backward(const Workspace& ws, const ImageTensor& dL_df,
                  std::vector<double>& grad) const override;
    ModelDescriptor descriptor() const override;

    int channels() const { return channels_; }
    int hidden() const { return hidden_; }

private:
    int layer_in(int layer) const;
    int layer_out(int layer) const;
    std::size_t weight_offset(int layer) const;
    std::size_t bias_offset(int layer) const;
    void init_params(std::uint64_t seed);

    int channels_;
    int hidden_;
    std::vector<int> dilations_;
    std::vector<double> params_;
};

/// Affine score s(x) = A x + b over the flattened tensor, with no
/// sigma-dependent scaling; the closed-form study model for single-level
/// training. A starts uniform with fan-in scaling, b at zero.
class LinearScoreHead : public TrainableModel {
public:
    LinearScoreHead(int height, int width, int channels, std::uint64_t seed);
    explicit LinearScoreHead(const ModelDescriptor& desc);

    std::vector<double>& params() override { return params_; }
    const std::vector<double>& params() const override { return params_; }
    double output_scale(double) const override { return 1.0; }
    ImageTensor forward(const ImageTensor& X, Workspace& ws) const override;
    void backward(const Workspace& ws, const ImageTensor& dL_df,
                  std::vector<double>& grad) const override;
    ModelDescriptor descriptor() const override;

    /// Entry (i, j) of A and entry i of b within params().
    double matrix_entry(std::size_t i, std::size_t j) const;
    double bias_entry(std::size_t i) const;

private:
    int height_;
    int width_;
    int channels_;
    std::size_t dim_;
    std::vector<double> params_;  // A row-major, then b
};

/// Rebuilds a model of the descriptor's architecture with freshly
/// initialized parameters (seed 0); callers overwrite them afterwards.
std::unique_ptr<TrainableModel> make_model(const ModelDescriptor& desc);

}  // namespace hgm
