#include "hgm/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include "hgm/degradation.hpp"
#include "hgm/metrics.hpp"
#include "hgm/nets.hpp"
#include "hgm/score.hpp"

namespace hgm {

std::vector<SampleSweepRow> sample_count_sweep(const SampleSweepConfig& cfg) {
    if (cfg.sample_counts.empty())
        throw std::invalid_argument("sample_count_sweep: empty sample-count list");
    if (cfg.seeds <= 0) throw std::invalid_argument("sample_count_sweep: seeds must be positive");

    ImageTensor mean_tensor(cfg.height, cfg.width, cfg.channels);
    std::fill(mean_tensor.data.begin(), mean_tensor.data.end(), cfg.mean);
    const GaussianScore oracle(mean_tensor, cfg.std_dev);
    const NoiseSchedule single_level =
        make_noise_schedule(cfg.sigma, cfg.sigma, 1, 2e-5, 1);

    std::vector<SampleSweepRow> rows;
    for (int n : cfg.sample_counts) {
        if (n <= 0) throw std::invalid_argument("sample_count_sweep: sample counts must be positive");
        SampleSweepRow row;
        row.sample_count = n;
        for (int s = 0; s < cfg.seeds; ++s) {
            const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(s);

            Rng data_rng = make_rng(run_seed, 10);
            std::vector<ImageTensor> dataset;
            dataset.reserve(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                ImageTensor x = normal_like(mean_tensor, data_rng);
                for (std::size_t k = 0; k < x.data.size(); ++k)
                    x.data[k] = cfg.mean + cfg.std_dev * x.data[k];
                dataset.push_back(std::move(x));
            }

            LinearScoreHead head(cfg.height, cfg.width, cfg.channels, run_seed);
            TrainConfig phase;
            phase.batch_size = cfg.batch_size;
            phase.seed = run_seed;
            phase.learning_rate = cfg.learning_rate_coarse;
            phase.iterations = cfg.iterations_coarse;
            train(head, dataset, single_level, phase);
            phase.learning_rate = cfg.learning_rate_fine;
            phase.iterations = cfg.iterations_fine;
            phase.seed = run_seed + 1;
            train(head, dataset, single_level, phase);

            // Held-out error against the closed-form score of the
            // sigma-perturbed population distribution.
            Rng heldout_rng = make_rng(run_seed, 11);
            double total = 0.0;
            for (int i = 0; i < cfg.heldout_count; ++i) {
                ImageTensor xt = normal_like(mean_tensor, heldout_rng);
                for (std::size_t k = 0; k < xt.data.size(); ++k)
                    xt.data[k] = cfg.mean + cfg.std_dev * xt.data[k];
                xt = perturb(xt, cfg.sigma, heldout_rng);
                const ImageTensor predicted = head.score(xt, cfg.sigma);
                const ImageTensor truth = oracle.score(xt, cfg.sigma);
                total += mean_squared_error(predicted, truth) *
                         static_cast<double>(predicted.size());
            }
            row.per_seed_errors.push_back(total / cfg.heldout_count);
        }
        double sum = 0.0;
        for (double e : row.per_seed_errors) sum += e;
        row.mean_heldout_error = sum / cfg.seeds;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TransformSweepRow> transform_sweep(const TransformSweepConfig& cfg) {
    if (cfg.kinds.empty()) throw std::invalid_argument("transform_sweep: empty transform list");
    if (cfg.restorations <= 0)
        throw std::invalid_argument("transform_sweep: restorations must be positive");

    // One shared inpainting instance: ground truth, mask, observation,
    // and the exact posterior mean.
    GaussianSpec prior;
    prior.mean = ImageTensor(cfg.height, cfg.width, 1);
    std::fill(prior.mean.data.begin(), prior.mean.data.end(), cfg.mean);
    prior.covariance =
        cfg.std_dev * cfg.std_dev * ar1_covariance(cfg.height, cfg.width, cfg.rho);

    Rng truth_rng = make_rng(cfg.seed, 20);
    const ImageTensor x_true =
        sample_correlated_gaussian(cfg.height, cfg.width, cfg.mean, cfg.std_dev, cfg.rho,
                                   truth_rng);
    Rng mask_rng = make_rng(cfg.seed, 21);
    const DegradationOp op = random_mask(cfg.height, cfg.width, 1, cfg.keep_fraction, mask_rng);
    Rng apply_rng = make_rng(cfg.seed, 22);
    const ImageTensor y = apply(op, x_true, apply_rng);
    const ImageTensor oracle = gaussian_conditional_mean(prior, y, op.mask);

    const ImageTensor truth_clamped = clamp01(x_true);
    const ImageTensor y_clamped = clamp01(y);
    const double observed_psnr = psnr(y_clamped, truth_clamped);

    std::vector<TransformSweepRow> rows;
    for (TransformKind kind : cfg.kinds) {
        const HighDimTransform t{kind};
        const GaussianSpec high = pushforward_gaussian(prior, t);
        const CovarianceGaussianScore model(high);

        ImageTensor average(cfg.height, cfg.width, 1);
        for (int run = 0; run < cfg.restorations; ++run) {
            RestoreConfig rc;
            rc.transform = t;
            rc.lambda_dc = cfg.lambda;
            rc.mode = RestoreMode::Basic;
            rc.schedule = cfg.schedule;
            rc.seed = cfg.seed + 100 + static_cast<std::uint64_t>(run);
            const RestorationResult result = restore_basic(y, op, model, rc);
            for (std::size_t i = 0; i < average.data.size(); ++i)
                average.data[i] += result.restored.data[i] / cfg.restorations;
        }

        TransformSweepRow row;
        row.kind = kind;
        double total = 0.0, worst = 0.0;
        for (std::size_t i = 0; i < average.data.size(); ++i) {
            const double err = std::abs(average.data[i] - oracle.data[i]);
            total += err;
            worst = std::max(worst, err);
        }
        row.mean_abs_error = total / static_cast<double>(average.size());
        row.max_abs_error = worst;
        row.psnr_restored = psnr(clamp01(average), truth_clamped);
        row.psnr_observed = observed_psnr;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hgm
