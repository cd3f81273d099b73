#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hgm/nets.hpp"
#include "hgm/schedule.hpp"
#include "hgm/score.hpp"
#include "hgm/tensor.hpp"

namespace hgm {

struct TrainConfig {
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 16;
    int iterations = 1000;
    std::uint64_t seed = 0;
    // When set, every noise level contributes to each example's loss
    // instead of one uniformly drawn level (the unbiased default).
    bool full_level_sum = false;
};

/// Raised when the training loss stops being finite.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& message, int iteration_index)
        : std::runtime_error(message), iteration(iteration_index) {}
    int iteration;
};

/// Monte Carlo denoising-score-matching loss: for each example x a level
/// sigma_i is drawn uniformly (or all levels are summed, see
/// full_level_sum), x~ = x + sigma_i z, and the contribution is
/// (1/2) |sigma_i s(x~, sigma_i) + z|^2, averaged over the batch.
double dsm_loss(const ScoreModel& model, const std::vector<ImageTensor>& batch,
                const NoiseSchedule& schedule, Rng& rng, bool full_level_sum = false);

/// Same loss for a trainable model, also accumulating d(loss)/d(params)
/// into grad (resized and zeroed here). Draws the identical random
/// sequence as dsm_loss, so the two agree given equal rng states.
double dsm_loss_grad(const TrainableModel& model, const std::vector<ImageTensor>& batch,
                     const NoiseSchedule& schedule, Rng& rng, std::vector<double>& grad,
                     bool full_level_sum = false);

struct TrainResult {
    std::vector<double> loss_history;  // one entry per iteration
};

/// Adam-driven minimization of dsm_loss over mini-batches drawn with
/// replacement from the dataset. Deterministic given cfg.seed; throws
/// TrainingError when the loss leaves the finite range.
TrainResult train(TrainableModel& model, const std::vector<ImageTensor>& dataset,
                  const NoiseSchedule& schedule, const TrainConfig& cfg);

struct GradCheckReport {
    bool passed = false;
    double max_relative_error = 0.0;
    std::size_t worst_index = 0;
    int checked_parameters = 0;
};

/// Validates backward() against central finite differences (step 1e-5) of
/// the scalar loss (1/2) |sigma * output_scale(sigma) * f(X) + z|^2 with a
/// fixed draw of z, on at least 100 randomly chosen parameters (all of
/// them for small models). Relative error uses a denominator floored at
/// 1% of the largest analytic gradient entry so that finite-difference
/// round-off on near-zero entries cannot dominate. corrupt_sign_index,
/// when non-negative, flips that entry of the analytic gradient first —
/// the hook for negative-control tests.
GradCheckReport grad_check(TrainableModel& model, const ImageTensor& X, double sigma,
                           double tolerance, Rng& rng, std::ptrdiff_t corrupt_sign_index = -1);

}  // namespace hgm
