#pragma once

#include <cstdint>
#include <vector>

#include "hgm/degradation.hpp"
#include "hgm/schedule.hpp"
#include "hgm/score.hpp"
#include "hgm/tensor.hpp"
#include "hgm/transforms.hpp"

namespace hgm {

enum class RestoreMode { Basic, Progressive };

/// How the two-stage mode's consistency gradient treats unobserved
/// entries: Augmented pulls them toward the stage-1 intermediate
/// reconstruction (the default); Masked ignores them entirely.
enum class DcOperand { Augmented, Masked };

struct RestoreConfig {
    HighDimTransform transform{TransformKind::Identity};
    double lambda_dc = 1.0;
    RestoreMode mode = RestoreMode::Basic;
    NoiseSchedule schedule = default_noise_schedule();
    std::uint64_t seed = 0;
    bool clamp_each_step = false;
    bool keep_snapshots = false;
    DcOperand dc_operand = DcOperand::Augmented;
};

struct RestorationResult {
    ImageTensor restored;  // always the observation's pre-transform shape
    std::vector<ImageTensor> per_level_snapshots;  // filled when keep_snapshots
    long iterations_run = 0;
    double wall_time_s = 0.0;
};

/// One Langevin update X + (alpha/2) * score + sqrt(alpha) * z with z
/// drawn i.i.d. standard normal from rng.
ImageTensor langevin_step(const ImageTensor& X, const ImageTensor& score, double alpha,
                          Rng& rng);

/// Deterministic-noise overload: the caller supplies z (test hook).
ImageTensor langevin_step(const ImageTensor& X, const ImageTensor& score, double alpha,
                          const ImageTensor& z);

/// Unconditional annealed Langevin sampling: starts from uniform noise on
/// [0,1] and runs steps_per_level updates at every level of the schedule.
ImageTensor generate(const ScoreModel& model, const NoiseSchedule& schedule, int height,
                     int width, int channels, Rng& rng);

/// Single-model restoration: the state lives in the transformed space and
/// every iteration alternates a Langevin update with the closed-form
/// data-fidelity projection. Per-level snapshots (when requested) hold the
/// original-space state at the end of each level.
RestorationResult restore_basic(const ImageTensor& y, const DegradationOp& op,
                                const ScoreModel& model, const RestoreConfig& cfg);

/// Two-stage restoration: per level, stage 1 runs the basic loop in the
/// original space (identity transform) to produce an intermediate
/// reconstruction, then stage 2 runs transformed-space Langevin updates
/// with an extra consistency gradient before the usual data-fidelity
/// projection. Both states persist across levels. The per-step consistency
/// coefficient (alpha/2) * lambda is capped at 1, making very large lambda
/// act as exact substitution instead of diverging.
RestorationResult restore_progressive(const ImageTensor& y, const DegradationOp& op,
                                      const ScoreModel& model_lowdim,
                                      const ScoreModel& model_highdim,
                                      const RestoreConfig& cfg);

}  // namespace hgm
