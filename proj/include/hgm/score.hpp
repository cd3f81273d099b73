#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "hgm/tensor.hpp"
#include "hgm/transforms.hpp"

namespace hgm {

/// Interface for anything that can report the score (gradient of the log
/// density) of a noise-perturbed distribution: given X ~ p * N(0, sigma^2 I),
/// returns grad_X log p_sigma(X). sigma == 0 queries the unperturbed density.
class ScoreModel {
public:
    virtual ~ScoreModel() = default;
    virtual ImageTensor score(const ImageTensor& X, double sigma) const = 0;
};

/// N(mean, std^2 I). The perturbed score is -(X - mean) / (std^2 + sigma^2).
class GaussianScore : public ScoreModel {
public:
    GaussianScore(ImageTensor mean, double std_dev);
    ImageTensor score(const ImageTensor& X, double sigma) const override;

    const ImageTensor& mean() const { return mean_; }
    double std_dev() const { return std_dev_; }

private:
    ImageTensor mean_;
    double std_dev_;
};

/// A dense Gaussian over the flattened tensor (row-major, channel fastest,
/// matching ImageTensor storage).
struct GaussianSpec {
    ImageTensor mean;
    Eigen::MatrixXd covariance;  // size() x size()
};

Eigen::VectorXd flatten(const ImageTensor& x);
ImageTensor unflatten(const Eigen::VectorXd& v, int height, int width, int channels);

/// N(mean, Sigma) with full covariance. The perturbed score is
/// -(Sigma + sigma^2 I)^{-1} (X - mean); factorizations are cached per
/// sigma because annealed sampling revisits each noise level many times.
class CovarianceGaussianScore : public ScoreModel {
public:
    explicit CovarianceGaussianScore(GaussianSpec spec);
    ImageTensor score(const ImageTensor& X, double sigma) const override;

    const GaussianSpec& spec() const { return spec_; }

private:
    GaussianSpec spec_;
    mutable std::mutex cache_mutex_;
    mutable std::map<double, Eigen::LLT<Eigen::MatrixXd>> cache_;
};

struct GmmComponent {
    double weight = 0.0;
    ImageTensor mean;
    double std_dev = 0.0;
};

/// Mixture of isotropic Gaussians over the whole tensor. The perturbed
/// score is the responsibility-weighted combination of component scores,
/// with responsibilities computed through log-sum-exp for stability.
class GmmScore : public ScoreModel {
public:
    explicit GmmScore(std::vector<GmmComponent> components);
    ImageTensor score(const ImageTensor& X, double sigma) const override;

    const std::vector<GmmComponent>& components() const { return components_; }

private:
    std::vector<GmmComponent> components_;
};

/// Adapts an arbitrary callable to the ScoreModel interface; used to plug
/// closed-form expressions into samplers and training code.
class FunctionScore : public ScoreModel {
public:
    using Fn = std::function<ImageTensor(const ImageTensor&, double)>;
    explicit FunctionScore(Fn fn) : fn_(std::move(fn)) {}
    ImageTensor score(const ImageTensor& X, double sigma) const override {
        return fn_(X, sigma);
    }

private:
    Fn fn_;
};

/// Image of a Gaussian under a (linear, invertible) transform: if
/// x ~ N(m, S) then t(x) ~ N(T m, T S T^T) where T is the matrix of the
/// transform, built column by column from basis vectors.
GaussianSpec pushforward_gaussian(const GaussianSpec& original, const HighDimTransform& t);

}  // namespace hgm
