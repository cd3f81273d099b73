#pragma once

#include <cstdint>
#include <vector>

#include "hgm/dsm.hpp"
#include "hgm/sampler.hpp"
#include "hgm/schedule.hpp"
#include "hgm/synthetic.hpp"
#include "hgm/transforms.hpp"

namespace hgm {

/// Sample-count study: train the linear score head on n isotropic-Gaussian
/// samples at a single noise level and measure the held-out squared score
/// error against the closed-form score, averaged over several seeds.
struct SampleSweepConfig {
    std::vector<int> sample_counts = {100, 1000, 10000};
    int seeds = 5;
    int height = 2;
    int width = 2;
    int channels = 1;
    double mean = 0.3;
    double std_dev = 0.5;
    double sigma = 0.5;
    int heldout_count = 2000;
    std::uint64_t seed = 0;
    // Two training phases (coarse then fine) so the optimizer noise floor
    // sits well below the n-dependent estimation error.
    int iterations_coarse = 4000;
    int iterations_fine = 4000;
    double learning_rate_coarse = 5e-3;
    double learning_rate_fine = 5e-4;
    int batch_size = 512;
};

struct SampleSweepRow {
    int sample_count = 0;
    double mean_heldout_error = 0.0;       // averaged over seeds
    std::vector<double> per_seed_errors;
};

std::vector<SampleSweepRow> sample_count_sweep(const SampleSweepConfig& cfg);

/// Transform study: restore a correlated-Gaussian inpainting task with the
/// analytic (pushforward) score under each transform and measure the
/// averaged restoration against the exact conditional-mean oracle.
struct TransformSweepConfig {
    std::vector<TransformKind> kinds = {TransformKind::Identity, TransformKind::Copy,
                                        TransformKind::Pool, TransformKind::Dwt};
    int height = 8;
    int width = 8;
    double mean = 0.5;
    double std_dev = 0.05;
    double rho = 0.9;
    double keep_fraction = 0.3;
    double lambda = 1e6;
    int restorations = 8;  // runs averaged per transform
    NoiseSchedule schedule = default_noise_schedule();
    std::uint64_t seed = 0;
};

struct TransformSweepRow {
    TransformKind kind = TransformKind::Identity;
    double mean_abs_error = 0.0;   // |averaged restoration - oracle|, mean
    double max_abs_error = 0.0;    // same, worst pixel
    double psnr_restored = 0.0;    // averaged restoration vs ground truth
    double psnr_observed = 0.0;    // raw observation vs ground truth
};

std::vector<TransformSweepRow> transform_sweep(const TransformSweepConfig& cfg);

}  // namespace hgm
