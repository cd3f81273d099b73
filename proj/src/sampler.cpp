#include "hgm/sampler.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace hgm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_observation(const ImageTensor& y, const DegradationOp& op) {
    require_same_shape(y, op.mask, "restore");
    if (op.observed_count() == 0)
        throw std::invalid_argument("restore: mask observes nothing");
}

/// Uniform-noise initialization with observed entries pinned to y.
ImageTensor initial_state(const ImageTensor& y, const DegradationOp& op, std::uint64_t seed) {
    ImageTensor x0(y.height, y.width, y.channels);
    Rng rng = make_rng(seed, /*stream=*/0);
    fill_uniform(x0, rng);
    for (std::size_t i = 0; i < x0.data.size(); ++i)
        if (op.mask.data[i] != 0.0) x0.data[i] = y.data[i];
    return x0;
}

}  // namespace

ImageTensor langevin_step(const ImageTensor& X, const ImageTensor& score, double alpha,
                          const ImageTensor& z) {
    require_same_shape(X, score, "langevin_step");
    require_same_shape(X, z, "langevin_step");
    if (alpha <= 0.0) throw std::invalid_argument("langevin_step: alpha must be positive");
    const double root = std::sqrt(alpha);
    ImageTensor out(X.height, X.width, X.channels);
    for (std::size_t i = 0; i < X.data.size(); ++i)
        out.data[i] = X.data[i] + 0.5 * alpha * score.data[i] + root * z.data[i];
    return out;
}

ImageTensor langevin_step(const ImageTensor& X, const ImageTensor& score, double alpha,
                          Rng& rng) {
    const ImageTensor z = normal_like(X, rng);
    return langevin_step(X, score, alpha, z);
}

ImageTensor generate(const ScoreModel& model, const NoiseSchedule& schedule, int height,
                     int width, int channels, Rng& rng) {
    ImageTensor X(height, width, channels);
    fill_uniform(X, rng);
    for (int level = 0; level < schedule.levels(); ++level) {
        const double alpha = step_size(schedule, level);
        const double sigma = schedule.sigma(level);
        for (int t = 0; t < schedule.steps_per_level; ++t) {
            const ImageTensor s = model.score(X, sigma);
            X = langevin_step(X, s, alpha, rng);
        }
    }
    return X;
}

RestorationResult restore_basic(const ImageTensor& y, const DegradationOp& op,
                                const ScoreModel& model, const RestoreConfig& cfg) {
    if (cfg.mode != RestoreMode::Basic)
        throw std::invalid_argument("restore_basic: config mode is not Basic");
    check_observation(y, op);
    const auto start = Clock::now();

    const ImageTensor x0 = initial_state(y, op, cfg.seed);
    ImageTensor X = h_forward(x0, cfg.transform);
    Rng rng = make_rng(cfg.seed, /*stream=*/1);

    RestorationResult result;
    ImageTensor x_plus = x0;
    for (int level = 0; level < cfg.schedule.levels(); ++level) {
        const double alpha = step_size(cfg.schedule, level);
        const double sigma = cfg.schedule.sigma(level);
        for (int t = 0; t < cfg.schedule.steps_per_level; ++t) {
            const ImageTensor s = model.score(X, sigma);
            X = langevin_step(X, s, alpha, rng);
            x_plus = data_fidelity_update(X, y, op, cfg.lambda_dc, cfg.transform);
            if (cfg.clamp_each_step) x_plus = clamp01(x_plus);
            X = h_forward(x_plus, cfg.transform);
            ++result.iterations_run;
        }
        if (cfg.keep_snapshots) result.per_level_snapshots.push_back(x_plus);
    }
    result.restored = h_inverse(X, cfg.transform);
    result.wall_time_s = seconds_since(start);
    return result;
}

RestorationResult restore_progressive(const ImageTensor& y, const DegradationOp& op,
                                      const ScoreModel& model_lowdim,
                                      const ScoreModel& model_highdim,
                                      const RestoreConfig& cfg) {
    if (cfg.mode != RestoreMode::Progressive)
        throw std::invalid_argument("restore_progressive: config mode is not Progressive");
    check_observation(y, op);
    const auto start = Clock::now();

    const HighDimTransform identity{TransformKind::Identity};
    const ImageTensor x0 = initial_state(y, op, cfg.seed);
    ImageTensor x = x0;                            // stage-1 state, original space
    ImageTensor X = h_forward(x0, cfg.transform);  // stage-2 state, transformed space
    Rng rng_main = make_rng(cfg.seed, /*stream=*/1);
    Rng rng_stage1 = make_rng(cfg.seed, /*stream=*/2);

    RestorationResult result;
    ImageTensor x_plus = x0;
    for (int level = 0; level < cfg.schedule.levels(); ++level) {
        const double alpha = step_size(cfg.schedule, level);
        const double sigma = cfg.schedule.sigma(level);

        // Stage 1: basic loop in the original space.
        for (int t = 0; t < cfg.schedule.steps_per_level; ++t) {
            const ImageTensor s = model_lowdim.score(x, sigma);
            x = langevin_step(x, s, alpha, rng_stage1);
            x = data_fidelity_update(x, y, op, cfg.lambda_dc, identity);
            if (cfg.clamp_each_step) x = clamp01(x);
            ++result.iterations_run;
        }
        const ImageTensor& x_rec = x;

        // The measurement augmented with the intermediate reconstruction:
        // observed entries keep y, unobserved ones take x_rec.
        ImageTensor y_aug = x_rec;
        for (std::size_t i = 0; i < y_aug.data.size(); ++i)
            if (op.mask.data[i] != 0.0) y_aug.data[i] = y.data[i];

        // Stage 2: transformed-space updates with the consistency gradient.
        const double dc_coefficient = std::min(0.5 * alpha * cfg.lambda_dc, 1.0);
        for (int t = 0; t < cfg.schedule.steps_per_level; ++t) {
            const ImageTensor s = model_highdim.score(X, sigma);
            ImageTensor dc;
            if (dc_coefficient > 0.0) {
                ImageTensor residual = h_inverse(X, cfg.transform);
                if (cfg.dc_operand == DcOperand::Augmented) {
                    for (std::size_t i = 0; i < residual.data.size(); ++i)
                        residual.data[i] -= y_aug.data[i];
                } else {
                    for (std::size_t i = 0; i < residual.data.size(); ++i)
                        residual.data[i] = op.mask.data[i] *
                                           (residual.data[i] - y.data[i]);
                }
                dc = h_forward(residual, cfg.transform);
            }
            X = langevin_step(X, s, alpha, rng_main);
            if (dc_coefficient > 0.0)
                for (std::size_t i = 0; i < X.data.size(); ++i)
                    X.data[i] -= dc_coefficient * dc.data[i];
            x_plus = data_fidelity_update(X, y, op, cfg.lambda_dc, cfg.transform);
            if (cfg.clamp_each_step) x_plus = clamp01(x_plus);
            X = h_forward(x_plus, cfg.transform);
            ++result.iterations_run;
        }
        if (cfg.keep_snapshots) result.per_level_snapshots.push_back(x_plus);
    }
    result.restored = h_inverse(X, cfg.transform);
    result.wall_time_s = seconds_since(start);
    return result;
}

}  // namespace hgm
