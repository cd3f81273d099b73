#include "hgm/score.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hgm {

GaussianScore::GaussianScore(ImageTensor mean, double std_dev)
    : mean_(std::move(mean)), std_dev_(std_dev) {
    if (std_dev_ <= 0.0)
        throw std::invalid_argument("GaussianScore: std_dev must be positive");
}

ImageTensor GaussianScore::score(const ImageTensor& X, double sigma) const {
    require_same_shape(mean_, X, "GaussianScore::score");
    const double total_var = std_dev_ * std_dev_ + sigma * sigma;
    ImageTensor out(X.height, X.width, X.channels);
    for (std::size_t i = 0; i < X.data.size(); ++i)
        out.data[i] = -(X.data[i] - mean_.data[i]) / total_var;
    return out;
}

Eigen::VectorXd flatten(const ImageTensor& x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.data.size(); ++i) v[static_cast<Eigen::Index>(i)] = x.data[i];
    return v;
}

ImageTensor unflatten(const Eigen::VectorXd& v, int height, int width, int channels) {
    ImageTensor x(height, width, channels);
    if (static_cast<std::size_t>(v.size()) != x.size())
        throw std::invalid_argument("unflatten: vector length does not match shape");
    for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] = v[static_cast<Eigen::Index>(i)];
    return x;
}

CovarianceGaussianScore::CovarianceGaussianScore(GaussianSpec spec) : spec_(std::move(spec)) {
    const auto d = static_cast<Eigen::Index>(spec_.mean.size());
    if (spec_.covariance.rows() != d || spec_.covariance.cols() != d)
        throw std::invalid_argument("CovarianceGaussianScore: covariance shape mismatch");
}

ImageTensor CovarianceGaussianScore::score(const ImageTensor& X, double sigma) const {
    require_same_shape(spec_.mean, X, "CovarianceGaussianScore::score");
    const Eigen::VectorXd delta = flatten(X) - flatten(spec_.mean);
    Eigen::VectorXd solved;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(sigma);
        if (it == cache_.end()) {
            Eigen::MatrixXd total = spec_.covariance;
            total.diagonal().array() += sigma * sigma;
            Eigen::LLT<Eigen::MatrixXd> llt(total);
            if (llt.info() != Eigen::Success)
                throw std::runtime_error(
                    "CovarianceGaussianScore: covariance + sigma^2 I is not positive definite");
            it = cache_.emplace(sigma, std::move(llt)).first;
        }
        solved = it->second.solve(delta);
    }
    return unflatten(-solved, X.height, X.width, X.channels);
}

GmmScore::GmmScore(std::vector<GmmComponent> components) : components_(std::move(components)) {
    if (components_.empty())
        throw std::invalid_argument("GmmScore: at least one component required");
    double total_weight = 0.0;
    for (const auto& c : components_) {
        if (c.weight <= 0.0)
            throw std::invalid_argument("GmmScore: component weights must be positive");
        if (c.std_dev <= 0.0)
            throw std::invalid_argument("GmmScore: component std_dev must be positive");
        require_same_shape(components_.front().mean, c.mean, "GmmScore");
        total_weight += c.weight;
    }
    if (std::abs(total_weight - 1.0) > 1e-12)
        throw std::invalid_argument("GmmScore: component weights must sum to 1");
}

ImageTensor GmmScore::score(const ImageTensor& X, double sigma) const {
    require_same_shape(components_.front().mean, X, "GmmScore::score");
    const std::size_t d = X.size();
    const std::size_t k = components_.size();

    // Log joint weight of each component at X under the sigma-perturbed
    // mixture; densities are isotropic so only the squared distance matters.
    std::vector<double> log_terms(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto& comp = components_[j];
        const double var = comp.std_dev * comp.std_dev + sigma * sigma;
        double sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = X.data[i] - comp.mean.data[i];
            sq += diff * diff;
        }
        log_terms[j] = std::log(comp.weight) -
                       0.5 * static_cast<double>(d) * std::log(2.0 * M_PI * var) -
                       sq / (2.0 * var);
    }
    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : log_terms) max_log = std::max(max_log, v);
    double denom = 0.0;
    for (double v : log_terms) denom += std::exp(v - max_log);

    ImageTensor out(X.height, X.width, X.channels);
    for (std::size_t j = 0; j < k; ++j) {
        const auto& comp = components_[j];
        const double var = comp.std_dev * comp.std_dev + sigma * sigma;
        const double responsibility = std::exp(log_terms[j] - max_log) / denom;
        for (std::size_t i = 0; i < d; ++i)
            out.data[i] += responsibility * (-(X.data[i] - comp.mean.data[i]) / var);
    }
    return out;
}

GaussianSpec pushforward_gaussian(const GaussianSpec& original, const HighDimTransform& t) {
    const int h = original.mean.height;
    const int w = original.mean.width;
    const int c = original.mean.channels;
    const auto d = static_cast<Eigen::Index>(original.mean.size());
    if (original.covariance.rows() != d || original.covariance.cols() != d)
        throw std::invalid_argument("pushforward_gaussian: covariance shape mismatch");

    const ImageTensor mean_out = h_forward(original.mean, t);
    const auto d_out = static_cast<Eigen::Index>(mean_out.size());

    // Materialize the transform matrix one basis vector at a time; all
    // supported transforms are linear so this is exact.
    Eigen::MatrixXd T(d_out, d);
    ImageTensor basis(h, w, c);
    for (Eigen::Index i = 0; i < d; ++i) {
        basis.data[static_cast<std::size_t>(i)] = 1.0;
        const ImageTensor column = h_forward(basis, t);
        for (Eigen::Index r = 0; r < d_out; ++r)
            T(r, i) = column.data[static_cast<std::size_t>(r)];
        basis.data[static_cast<std::size_t>(i)] = 0.0;
    }

    GaussianSpec out;
    out.mean = mean_out;
    out.covariance = T * original.covariance * T.transpose();
    return out;
}

}  // namespace hgm
