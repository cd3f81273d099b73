#include "hgm/dsm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hgm/parallel.hpp"

namespace hgm {

namespace {

// One perturbation task: example index, noise level, and the pre-drawn z.
struct Draw {
    std::size_t example = 0;
    int level = 0;
    ImageTensor z;
};

// Draws everything sequentially from rng so the consumed sequence is
// independent of how the compute below is parallelized.
std::vector<Draw> make_draws(std::size_t batch_size, const ImageTensor& shape_like,
                             const NoiseSchedule& schedule, Rng& rng, bool full_level_sum) {
    std::vector<Draw> draws;
    std::uniform_int_distribution<int> level_dist(0, schedule.levels() - 1);
    for (std::size_t e = 0; e < batch_size; ++e) {
        if (full_level_sum) {
            for (int l = 0; l < schedule.levels(); ++l) {
                Draw d;
                d.example = e;
                d.level = l;
                d.z = normal_like(shape_like, rng);
                draws.push_back(std::move(d));
            }
        } else {
            Draw d;
            d.example = e;
            d.level = level_dist(rng);
            d.z = normal_like(shape_like, rng);
            draws.push_back(std::move(d));
        }
    }
    return draws;
}

double batch_normalizer(std::size_t batch_size, bool full_level_sum, int levels) {
    return full_level_sum ? static_cast<double>(batch_size) * levels
                          : static_cast<double>(batch_size);
}

}  // namespace

double dsm_loss(const ScoreModel& model, const std::vector<ImageTensor>& batch,
                const NoiseSchedule& schedule, Rng& rng, bool full_level_sum) {
    if (batch.empty()) throw std::invalid_argument("dsm_loss: empty batch");
    for (const auto& x : batch) require_same_shape(batch.front(), x, "dsm_loss");

    const auto draws = make_draws(batch.size(), batch.front(), schedule, rng, full_level_sum);
    std::vector<double> losses(draws.size(), 0.0);
    parallel_for(static_cast<int>(draws.size()), [&](int k) {
        const Draw& d = draws[static_cast<std::size_t>(k)];
        const ImageTensor& x = batch[d.example];
        const double sigma = schedule.sigma(d.level);
        ImageTensor xt = x;
        for (std::size_t i = 0; i < xt.data.size(); ++i) xt.data[i] += sigma * d.z.data[i];
        const ImageTensor s = model.score(xt, sigma);
        double sq = 0.0;
        for (std::size_t i = 0; i < s.data.size(); ++i) {
            const double r = sigma * s.data[i] + d.z.data[i];
            sq += r * r;
        }
        losses[static_cast<std::size_t>(k)] = 0.5 * sq;
    });
    const double total = std::accumulate(losses.begin(), losses.end(), 0.0);
    return total / batch_normalizer(batch.size(), full_level_sum, schedule.levels());
}

double dsm_loss_grad(const TrainableModel& model, const std::vector<ImageTensor>& batch,
                     const NoiseSchedule& schedule, Rng& rng, std::vector<double>& grad,
                     bool full_level_sum) {
    if (batch.empty()) throw std::invalid_argument("dsm_loss_grad: empty batch");
    for (const auto& x : batch) require_same_shape(batch.front(), x, "dsm_loss_grad");

    const auto draws = make_draws(batch.size(), batch.front(), schedule, rng, full_level_sum);
    const std::size_t n_params = model.params().size();
    std::vector<double> losses(draws.size(), 0.0);
    std::vector<std::vector<double>> partial_grads(draws.size());

    parallel_for(static_cast<int>(draws.size()), [&](int k) {
        const Draw& d = draws[static_cast<std::size_t>(k)];
        const ImageTensor& x = batch[d.example];
        const double sigma = schedule.sigma(d.level);
        ImageTensor xt = x;
        for (std::size_t i = 0; i < xt.data.size(); ++i) xt.data[i] += sigma * d.z.data[i];

        Workspace ws;
        const ImageTensor f = model.forward(xt, ws);
        const double c = sigma * model.output_scale(sigma);

        ImageTensor dL_df(f.height, f.width, f.channels);
        double sq = 0.0;
        for (std::size_t i = 0; i < f.data.size(); ++i) {
            const double r = c * f.data[i] + d.z.data[i];
            sq += r * r;
            dL_df.data[i] = c * r;
        }
        losses[static_cast<std::size_t>(k)] = 0.5 * sq;

        auto& g = partial_grads[static_cast<std::size_t>(k)];
        g.assign(n_params, 0.0);
        model.backward(ws, dL_df, g);
    });

    // Fixed-order reduction keeps results identical across thread counts.
    const double norm = batch_normalizer(batch.size(), full_level_sum, schedule.levels());
    grad.assign(n_params, 0.0);
    for (const auto& g : partial_grads)
        for (std::size_t i = 0; i < n_params; ++i) grad[i] += g[i] / norm;
    const double total = std::accumulate(losses.begin(), losses.end(), 0.0);
    return total / norm;
}

TrainResult train(TrainableModel& model, const std::vector<ImageTensor>& dataset,
                  const NoiseSchedule& schedule, const TrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    if (cfg.batch_size <= 0) throw std::invalid_argument("train: batch_size must be positive");
    if (cfg.iterations < 0) throw std::invalid_argument("train: iterations must be non-negative");
    for (const auto& x : dataset) require_same_shape(dataset.front(), x, "train");

    Rng rng = make_rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);

    std::vector<double>& theta = model.params();
    std::vector<double> m(theta.size(), 0.0);
    std::vector<double> v(theta.size(), 0.0);
    std::vector<double> grad;
    std::vector<ImageTensor> batch;
    TrainResult result;
    result.loss_history.reserve(static_cast<std::size_t>(cfg.iterations));

    for (int it = 1; it <= cfg.iterations; ++it) {
        batch.clear();
        for (int b = 0; b < cfg.batch_size; ++b) batch.push_back(dataset[pick(rng)]);

        const double loss = dsm_loss_grad(model, batch, schedule, rng, grad, cfg.full_level_sum);
        if (!std::isfinite(loss))
            throw TrainingError("train: loss is not finite at iteration " + std::to_string(it),
                                it);
        result.loss_history.push_back(loss);

        const double bc1 = 1.0 - std::pow(cfg.adam_beta1, it);
        const double bc2 = 1.0 - std::pow(cfg.adam_beta2, it);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
            v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
        }
    }
    return result;
}

GradCheckReport grad_check(TrainableModel& model, const ImageTensor& X, double sigma,
                           double tolerance, Rng& rng, std::ptrdiff_t corrupt_sign_index) {
    if (tolerance <= 0.0) throw std::invalid_argument("grad_check: tolerance must be positive");
    if (sigma <= 0.0) throw std::invalid_argument("grad_check: sigma must be positive");

    const ImageTensor z = normal_like(X, rng);
    const double c = sigma * model.output_scale(sigma);

    // loss(theta) = 0.5 |c f_theta(X) + z|^2 with X and z held fixed: a
    // deterministic scalar suitable for finite differencing.
    const auto loss_at = [&]() {
        Workspace ws;
        const ImageTensor f = model.forward(X, ws);
        double sq = 0.0;
        for (std::size_t i = 0; i < f.data.size(); ++i) {
            const double r = c * f.data[i] + z.data[i];
            sq += r * r;
        }
        return 0.5 * sq;
    };

    std::vector<double> analytic(model.params().size(), 0.0);
    {
        Workspace ws;
        const ImageTensor f = model.forward(X, ws);
        ImageTensor dL_df(f.height, f.width, f.channels);
        for (std::size_t i = 0; i < f.data.size(); ++i)
            dL_df.data[i] = c * (c * f.data[i] + z.data[i]);
        model.backward(ws, dL_df, analytic);
    }
    if (corrupt_sign_index >= 0) {
        const auto idx = static_cast<std::size_t>(corrupt_sign_index);
        if (idx >= analytic.size())
            throw std::invalid_argument("grad_check: corrupt_sign_index out of range");
        analytic[idx] = -analytic[idx];
    }

    double max_abs_grad = 0.0;
    std::size_t argmax_grad = 0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        if (std::abs(analytic[i]) > max_abs_grad) {
            max_abs_grad = std::abs(analytic[i]);
            argmax_grad = i;
        }
    }

    // Checked set: every parameter for small models; otherwise a random
    // subset of at least 100, always including the largest-gradient entry
    // (and the corrupted one, so negative controls cannot slip through).
    constexpr std::size_t kMinChecked = 128;
    std::vector<std::size_t> indices;
    if (model.params().size() <= kMinChecked) {
        indices.resize(model.params().size());
        std::iota(indices.begin(), indices.end(), std::size_t{0});
    } else {
        std::vector<std::size_t> all(model.params().size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t k = 0; k < kMinChecked; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, all.size() - 1);
            std::swap(all[k], all[pick(rng)]);
            indices.push_back(all[k]);
        }
        indices.push_back(argmax_grad);
        if (corrupt_sign_index >= 0)
            indices.push_back(static_cast<std::size_t>(corrupt_sign_index));
    }

    constexpr double kStep = 1e-5;
    const double denominator_floor = 0.01 * max_abs_grad;
    GradCheckReport report;
    report.checked_parameters = static_cast<int>(indices.size());
    std::vector<double>& theta = model.params();
    for (std::size_t idx : indices) {
        const double saved = theta[idx];
        theta[idx] = saved + kStep;
        const double plus = loss_at();
        theta[idx] = saved - kStep;
        const double minus = loss_at();
        theta[idx] = saved;
        const double fd = (plus - minus) / (2.0 * kStep);
        const double denom =
            std::max({std::abs(analytic[idx]), std::abs(fd), denominator_floor});
        const double rel = (denom > 0.0) ? std::abs(analytic[idx] - fd) / denom : 0.0;
        if (rel > report.max_relative_error) {
            report.max_relative_error = rel;
            report.worst_index = idx;
        }
    }
    report.passed = report.max_relative_error < tolerance;
    return report;
}

}  // namespace hgm
