// Command-line front end: train / restore / generate / sweep / eval plus a
// rerun command that replays a recorded manifest. Every command resolves
// its configuration (file values overlaid with flags), writes its outputs
// under --out-dir, and records a manifest.json with content hashes of all
// inputs and outputs.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hgm/checkpoint.hpp"
#include "hgm/config.hpp"
#include "hgm/degradation.hpp"
#include "hgm/dsm.hpp"
#include "hgm/manifest.hpp"
#include "hgm/metrics.hpp"
#include "hgm/nets.hpp"
#include "hgm/parallel.hpp"
#include "hgm/png_io.hpp"
#include "hgm/sampler.hpp"
#include "hgm/schedule.hpp"
#include "hgm/score.hpp"
#include "hgm/sweep.hpp"
#include "hgm/synthetic.hpp"
#include "hgm/tensor.hpp"
#include "hgm/transforms.hpp"

namespace fs = std::filesystem;
using namespace hgm;

namespace {

using Clock = std::chrono::steady_clock;

// RNG stream assignments shared by all commands; documented in README.
// Streams 0-2 are reserved by the samplers (init / main / stage 1).
constexpr std::uint64_t kStreamObservationNoise = 3;
constexpr std::uint64_t kStreamMask = 4;
constexpr std::uint64_t kStreamGenerate = 5;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// PSNR plus SSIM, with SSIM reported as NaN for images smaller than its
// fixed 11x11 window instead of failing the whole run.
MetricReport safe_metrics(const ImageTensor& candidate, const ImageTensor& reference) {
    MetricReport report;
    report.psnr_db = psnr(candidate, reference);
    report.ssim = (reference.height < 11 || reference.width < 11)
                      ? std::numeric_limits<double>::quiet_NaN()
                      : ssim(candidate, reference);
    return report;
}

std::vector<std::string> png_files_in(const std::string& dir) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

NoiseSchedule schedule_from_config(const ConfigFile& cfg) {
    return make_noise_schedule(cfg.get_double("schedule", "sigma_first", 1.0),
                               cfg.get_double("schedule", "sigma_last", 0.01),
                               static_cast<int>(cfg.get_int("schedule", "levels", 10)),
                               cfg.get_double("schedule", "epsilon", 2e-5),
                               static_cast<int>(cfg.get_int("schedule", "steps_per_level", 80)));
}

DegradationOp degradation_from_config(const ConfigFile& cfg, int height, int width,
                                      int channels, std::uint64_t seed,
                                      std::vector<std::pair<std::string, std::string>>* inputs) {
    const std::string kind = cfg.get_string("degradation", "mask", "random");
    DegradationOp op;
    if (kind == "bayer") {
        op = bayer_mask(height, width);
    } else if (kind == "random") {
        Rng rng = make_rng(seed, kStreamMask);
        op = random_mask(height, width, channels,
                         cfg.get_double("degradation", "keep_fraction", 0.3), rng);
    } else if (kind == "block") {
        op = block_mask(height, width, channels,
                        cfg.get_double("degradation", "coverage", 0.25));
    } else if (kind == "file") {
        const std::string path = cfg.get_string("degradation", "mask_file", "");
        if (path.empty()) throw std::runtime_error("degradation: mask_file not set");
        op = load_mask(path, channels);
        if (inputs) inputs->emplace_back(path, fnv1a_file(path));
    } else {
        throw std::runtime_error("degradation: unknown mask kind '" + kind + "'");
    }
    op.noise_std = cfg.get_double("degradation", "noise_std", 0.0);
    return op;
}

GaussianSpec gaussian_spec_from_config(const ConfigFile& cfg, int height, int width,
                                       int channels) {
    GaussianSpec spec;
    spec.mean = ImageTensor(height, width, channels, cfg.get_double("model", "mean", 0.5));
    const double std_dev = cfg.get_double("model", "std", 0.05);
    const double rho = cfg.get_double("model", "rho", 0.0);
    const auto d = static_cast<Eigen::Index>(spec.mean.size());
    if (rho > 0.0) {
        if (channels != 1)
            throw std::runtime_error("model: correlated gaussian requires 1 channel");
        spec.covariance = std_dev * std_dev * ar1_covariance(height, width, rho);
    } else {
        spec.covariance = std_dev * std_dev * Eigen::MatrixXd::Identity(d, d);
    }
    return spec;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Output bookkeeping: records (path, hash) pairs in creation order.
struct OutputSet {
    std::string dir;
    std::vector<std::pair<std::string, std::string>> entries;

    std::string path(const std::string& name) const { return (fs::path(dir) / name).string(); }
    void record(const std::string& full_path) {
        entries.emplace_back(full_path, fnv1a_file(full_path));
    }
    void write_image(const std::string& name, const ImageTensor& image) {
        const std::string p = path(name);
        save_png(p, image);
        record(p);
    }
    void write_text(const std::string& name, const std::string& text) {
        const std::string p = path(name);
        write_text_file(p, text);
        record(p);
    }
};

void finish_manifest(const std::string& command, const ConfigFile& cfg, std::uint64_t seed,
                     const std::vector<std::pair<std::string, std::string>>& inputs,
                     OutputSet& outputs, Clock::time_point start) {
    RunManifest manifest;
    manifest.command = command;
    manifest.config = cfg.sections();
    manifest.seed = seed;
    manifest.inputs = inputs;
    manifest.outputs = outputs.entries;
    manifest.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    write_manifest(outputs.path("manifest.json"), manifest);
}

// ---------------------------------------------------------------------------
// train

int run_train(const ConfigFile& cfg) {
    const auto start = Clock::now();
    const std::uint64_t seed = cfg.get_uint("run", "seed", 0);
    OutputSet out{cfg.get_string("run", "out_dir", "out"), {}};
    fs::create_directories(out.dir);

    const std::string dataset_dir = cfg.get_string("train", "dataset_dir", "");
    if (dataset_dir.empty()) throw std::runtime_error("train: dataset_dir not set");
    const std::vector<std::string> files = png_files_in(dataset_dir);
    if (files.empty()) throw std::runtime_error("train: no .png files in " + dataset_dir);

    std::vector<std::pair<std::string, std::string>> inputs;
    const HighDimTransform transform{
        transform_kind_from_string(cfg.get_string("train", "transform", "identity"))};
    std::vector<ImageTensor> dataset;
    dataset.reserve(files.size());
    for (const std::string& f : files) {
        inputs.emplace_back(f, fnv1a_file(f));
        dataset.push_back(h_forward(load_png(f), transform));
        require_same_shape(dataset.front(), dataset.back(), "train dataset");
    }

    const NoiseSchedule schedule = schedule_from_config(cfg);
    const std::string architecture = cfg.get_string("train", "architecture", "conv");
    std::unique_ptr<TrainableModel> model;
    if (architecture == "conv") {
        model = std::make_unique<ConvScoreNet>(
            dataset.front().channels, static_cast<int>(cfg.get_int("train", "hidden", 32)),
            seed);
    } else if (architecture == "linear") {
        model = std::make_unique<LinearScoreHead>(dataset.front().height,
                                                  dataset.front().width,
                                                  dataset.front().channels, seed);
    } else {
        throw std::runtime_error("train: unknown architecture '" + architecture + "'");
    }

    TrainConfig tc;
    tc.learning_rate = cfg.get_double("train", "learning_rate", 1e-4);
    tc.batch_size = static_cast<int>(cfg.get_int("train", "batch_size", 16));
    tc.iterations = static_cast<int>(cfg.get_int("train", "iterations", 1000));
    tc.full_level_sum = cfg.get_bool("train", "full_level_sum", false);
    tc.seed = seed;
    const TrainResult result = train(*model, dataset, schedule, tc);

    save_checkpoint(out.path("checkpoint.json"), *model, schedule, seed);
    out.record(out.path("checkpoint.json"));

    std::string csv = "iteration,loss\n";
    for (std::size_t i = 0; i < result.loss_history.size(); ++i)
        csv += std::to_string(i + 1) + "," + format_double(result.loss_history[i]) + "\n";
    out.write_text("loss.csv", csv);

    finish_manifest("train", cfg, seed, inputs, out, start);
    return 0;
}

// ---------------------------------------------------------------------------
// restore

struct RestoreModels {
    std::unique_ptr<ScoreModel> lowdim;   // original space (progressive stage 1)
    std::unique_ptr<ScoreModel> highdim;  // transformed space
};

RestoreModels restore_models_from_config(const ConfigFile& cfg, const ImageTensor& sample,
                                         const HighDimTransform& transform, bool progressive,
                                         NoiseSchedule* checkpoint_schedule,
                                         std::vector<std::pair<std::string, std::string>>* inputs) {
    RestoreModels models;
    const std::string kind = cfg.get_string("model", "kind", "gaussian");
    if (kind == "gaussian") {
        const GaussianSpec spec =
            gaussian_spec_from_config(cfg, sample.height, sample.width, sample.channels);
        if (progressive) models.lowdim = std::make_unique<CovarianceGaussianScore>(spec);
        if (transform.kind == TransformKind::Identity)
            models.highdim = std::make_unique<CovarianceGaussianScore>(spec);
        else
            models.highdim = std::make_unique<CovarianceGaussianScore>(
                pushforward_gaussian(spec, transform));
        return models;
    }
    if (kind != "checkpoint")
        throw std::runtime_error("model: unknown kind '" + kind + "'");

    const std::string path = cfg.get_string("model", "checkpoint", "");
    if (path.empty()) throw std::runtime_error("model: checkpoint not set");
    const Checkpoint ckpt = load_checkpoint(path);
    if (inputs) inputs->emplace_back(path, fnv1a_file(path));
    if (checkpoint_schedule) *checkpoint_schedule = ckpt.schedule;
    models.highdim = model_from_checkpoint(ckpt);

    if (progressive) {
        const std::string low_path = cfg.get_string("model", "checkpoint_lowdim", "");
        if (low_path.empty()) {
            if (transform.kind != TransformKind::Identity)
                throw std::runtime_error(
                    "model: progressive mode with a non-identity transform needs "
                    "checkpoint_lowdim");
            models.lowdim = model_from_checkpoint(ckpt);
        } else {
            const Checkpoint low = load_checkpoint(low_path);
            if (inputs) inputs->emplace_back(low_path, fnv1a_file(low_path));
            models.lowdim = model_from_checkpoint(low);
        }
    }
    return models;
}

int run_restore(const ConfigFile& cfg) {
    const auto start = Clock::now();
    const std::uint64_t seed = cfg.get_uint("run", "seed", 0);
    OutputSet out{cfg.get_string("run", "out_dir", "out"), {}};
    fs::create_directories(out.dir);

    std::vector<std::string> files = cfg.get_list("restore", "inputs");
    const std::string input_dir = cfg.get_string("restore", "input_dir", "");
    if (!input_dir.empty()) {
        const std::vector<std::string> found = png_files_in(input_dir);
        files.insert(files.end(), found.begin(), found.end());
    }
    if (files.empty()) throw std::runtime_error("restore: no input images configured");

    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<ImageTensor> images;
    for (const std::string& f : files) {
        inputs.emplace_back(f, fnv1a_file(f));
        images.push_back(load_png(f));
        require_same_shape(images.front(), images.back(), "restore inputs");
    }
    const ImageTensor& sample = images.front();

    const HighDimTransform transform{
        transform_kind_from_string(cfg.get_string("restore", "transform", "identity"))};
    const std::string mode_name = cfg.get_string("restore", "mode", "basic");
    if (mode_name != "basic" && mode_name != "progressive")
        throw std::runtime_error("restore: unknown mode '" + mode_name + "'");
    const bool progressive = (mode_name == "progressive");

    NoiseSchedule checkpoint_schedule;
    bool have_checkpoint_schedule = false;
    RestoreModels models;
    {
        NoiseSchedule loaded;
        models = restore_models_from_config(cfg, sample, transform, progressive,
                                            &loaded, &inputs);
        if (!loaded.sigmas.empty()) {
            checkpoint_schedule = loaded;
            have_checkpoint_schedule = true;
        }
    }

    RestoreConfig rc;
    rc.transform = transform;
    rc.lambda_dc = cfg.get_double("restore", "lambda", 1.0);
    rc.mode = progressive ? RestoreMode::Progressive : RestoreMode::Basic;
    rc.schedule = (have_checkpoint_schedule && !cfg.has("schedule", "levels") &&
                   !cfg.has("schedule", "sigma_first"))
                      ? checkpoint_schedule
                      : schedule_from_config(cfg);
    rc.clamp_each_step = cfg.get_bool("restore", "clamp_each_step", false);
    rc.keep_snapshots = cfg.get_bool("restore", "snapshots", false);
    const std::string operand = cfg.get_string("restore", "dc_operand", "augmented");
    if (operand == "augmented")
        rc.dc_operand = DcOperand::Augmented;
    else if (operand == "masked")
        rc.dc_operand = DcOperand::Masked;
    else
        throw std::runtime_error("restore: unknown dc_operand '" + operand + "'");

    const DegradationOp op = degradation_from_config(cfg, sample.height, sample.width,
                                                     sample.channels, seed, &inputs);

    struct PerImage {
        ImageTensor restored_clamped;
        ImageTensor diff;
        std::vector<ImageTensor> snapshots;
        MetricReport metrics;
        double wall_time_s = 0.0;
    };
    std::vector<PerImage> results(images.size());

    parallel_for(static_cast<int>(images.size()), [&](int i) {
        const ImageTensor& truth = images[static_cast<std::size_t>(i)];
        Rng noise_rng = make_rng(seed + static_cast<std::uint64_t>(i), kStreamObservationNoise);
        const ImageTensor y = apply(op, truth, noise_rng);

        RestoreConfig local = rc;
        local.seed = seed + static_cast<std::uint64_t>(i);
        const RestorationResult r =
            progressive ? restore_progressive(y, op, *models.lowdim, *models.highdim, local)
                        : restore_basic(y, op, *models.highdim, local);

        PerImage& slot = results[static_cast<std::size_t>(i)];
        slot.restored_clamped = clamp01(r.restored);
        slot.metrics = safe_metrics(slot.restored_clamped, truth);
        slot.wall_time_s = r.wall_time_s;
        ImageTensor diff(truth.height, truth.width, truth.channels);
        for (std::size_t k = 0; k < diff.data.size(); ++k)
            diff.data[k] = 0.5 + slot.restored_clamped.data[k] - truth.data[k];
        slot.diff = clamp01(diff);
        for (const ImageTensor& snap : r.per_level_snapshots)
            slot.snapshots.push_back(clamp01(snap));
    });

    if (rc.keep_snapshots) {
        std::string json = "{\n  \"levels\": [";
        for (int i = 0; i < rc.schedule.levels(); ++i) {
            json += i ? ",\n    {" : "\n    {";
            json += "\"sigma\": " + format_double(rc.schedule.sigma(i)) +
                    ", \"alpha\": " + format_double(step_size(rc.schedule, i)) +
                    ", \"iterations\": " + std::to_string(rc.schedule.steps_per_level) + "}";
        }
        json += "\n  ]\n}\n";
        out.write_text("snapshots.json", json);
    }

    const std::string mask_name = cfg.get_string("degradation", "mask", "random");
    std::string csv = "image_id,mask_kind,transform,mode,psnr_db,ssim,seed,wall_time_s\n";
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string id = stem_of(files[i]);
        out.write_image("restored_" + id + ".png", results[i].restored_clamped);
        out.write_image("diff_" + id + ".png", results[i].diff);
        for (std::size_t level = 0; level < results[i].snapshots.size(); ++level) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%s_level%02zu.png", id.c_str(),
                          level + 1);
            out.write_image(name, results[i].snapshots[level]);
        }
        csv += id + "," + mask_name + "," + to_string(transform.kind) + "," + mode_name + "," +
               format_double(results[i].metrics.psnr_db) + "," +
               format_double(results[i].metrics.ssim) + "," +
               std::to_string(seed + i) + "," + format_double(results[i].wall_time_s) + "\n";
    }
    out.write_text("metrics.csv", csv);

    finish_manifest("restore", cfg, seed, inputs, out, start);
    return 0;
}

// ---------------------------------------------------------------------------
// generate

int run_generate(const ConfigFile& cfg) {
    const auto start = Clock::now();
    const std::uint64_t seed = cfg.get_uint("run", "seed", 0);
    OutputSet out{cfg.get_string("run", "out_dir", "out"), {}};
    fs::create_directories(out.dir);

    std::vector<std::pair<std::string, std::string>> inputs;
    const std::string kind = cfg.get_string("model", "kind", "gaussian");
    int height = static_cast<int>(cfg.get_int("generate", "height", 8));
    int width = static_cast<int>(cfg.get_int("generate", "width", 8));
    int channels = static_cast<int>(cfg.get_int("generate", "channels", 1));

    NoiseSchedule schedule = schedule_from_config(cfg);
    std::unique_ptr<ScoreModel> model;
    if (kind == "gaussian") {
        const double rho = cfg.get_double("model", "rho", 0.0);
        if (rho > 0.0) {
            model = std::make_unique<CovarianceGaussianScore>(
                gaussian_spec_from_config(cfg, height, width, channels));
        } else {
            ImageTensor mean(height, width, channels, cfg.get_double("model", "mean", 0.5));
            model = std::make_unique<GaussianScore>(std::move(mean),
                                                    cfg.get_double("model", "std", 0.05));
        }
    } else if (kind == "checkpoint") {
        const std::string path = cfg.get_string("model", "checkpoint", "");
        if (path.empty()) throw std::runtime_error("model: checkpoint not set");
        const Checkpoint ckpt = load_checkpoint(path);
        inputs.emplace_back(path, fnv1a_file(path));
        if (!cfg.has("schedule", "levels") && !cfg.has("schedule", "sigma_first"))
            schedule = ckpt.schedule;
        if (ckpt.descriptor.architecture == "linear") {
            height = ckpt.descriptor.height;
            width = ckpt.descriptor.width;
            channels = ckpt.descriptor.channels;
        } else {
            channels = ckpt.descriptor.channels;
        }
        model = model_from_checkpoint(ckpt);
    } else {
        throw std::runtime_error("model: unknown kind '" + kind + "'");
    }

    const int count = static_cast<int>(cfg.get_int("generate", "count", 4));
    if (count < 0) throw std::runtime_error("generate: count must be non-negative");
    std::vector<ImageTensor> samples(static_cast<std::size_t>(count));
    parallel_for(count, [&](int i) {
        Rng rng = make_rng(seed + static_cast<std::uint64_t>(i), kStreamGenerate);
        samples[static_cast<std::size_t>(i)] =
            clamp01(generate(*model, schedule, height, width, channels, rng));
    });
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "sample_%03d.png", i);
        out.write_image(name, samples[static_cast<std::size_t>(i)]);
    }

    finish_manifest("generate", cfg, seed, inputs, out, start);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

int run_sweep(const ConfigFile& cfg) {
    const auto start = Clock::now();
    const std::uint64_t seed = cfg.get_uint("run", "seed", 0);
    OutputSet out{cfg.get_string("run", "out_dir", "out"), {}};
    fs::create_directories(out.dir);

    const std::string kind = cfg.get_string("sweep", "kind", "both");
    if (kind != "samples" && kind != "transforms" && kind != "both")
        throw std::runtime_error("sweep: unknown kind '" + kind + "'");

    if (kind == "samples" || kind == "both") {
        SampleSweepConfig sc;
        const std::vector<std::int64_t> counts = cfg.get_int_list("sweep", "sample_counts");
        if (!counts.empty()) {
            sc.sample_counts.clear();
            for (std::int64_t n : counts) sc.sample_counts.push_back(static_cast<int>(n));
        }
        sc.seeds = static_cast<int>(cfg.get_int("sweep", "seeds", 5));
        sc.height = static_cast<int>(cfg.get_int("sweep", "sample_height", 2));
        sc.width = static_cast<int>(cfg.get_int("sweep", "sample_width", 2));
        sc.channels = static_cast<int>(cfg.get_int("sweep", "sample_channels", 1));
        sc.mean = cfg.get_double("sweep", "sample_mean", 0.3);
        sc.std_dev = cfg.get_double("sweep", "sample_std", 0.5);
        sc.sigma = cfg.get_double("sweep", "sample_sigma", 0.5);
        sc.heldout_count = static_cast<int>(cfg.get_int("sweep", "heldout", 2000));
        sc.iterations_coarse =
            static_cast<int>(cfg.get_int("sweep", "iterations_coarse", sc.iterations_coarse));
        sc.iterations_fine =
            static_cast<int>(cfg.get_int("sweep", "iterations_fine", sc.iterations_fine));
        sc.learning_rate_coarse =
            cfg.get_double("sweep", "learning_rate_coarse", sc.learning_rate_coarse);
        sc.learning_rate_fine =
            cfg.get_double("sweep", "learning_rate_fine", sc.learning_rate_fine);
        sc.batch_size = static_cast<int>(cfg.get_int("sweep", "batch_size", sc.batch_size));
        sc.seed = seed;
        const std::vector<SampleSweepRow> rows = sample_count_sweep(sc);

        std::string csv = "n,seed,heldout_error\n";
        for (const SampleSweepRow& row : rows)
            for (std::size_t s = 0; s < row.per_seed_errors.size(); ++s)
                csv += std::to_string(row.sample_count) + "," + std::to_string(s) + "," +
                       format_double(row.per_seed_errors[s]) + "\n";
        out.write_text("sweep_samples.csv", csv);
    }

    if (kind == "transforms" || kind == "both") {
        TransformSweepConfig tc;
        const std::vector<std::string> kinds = cfg.get_list("sweep", "transforms");
        if (!kinds.empty()) {
            tc.kinds.clear();
            for (const std::string& k : kinds) tc.kinds.push_back(transform_kind_from_string(k));
        }
        tc.height = static_cast<int>(cfg.get_int("sweep", "height", 8));
        tc.width = static_cast<int>(cfg.get_int("sweep", "width", 8));
        tc.mean = cfg.get_double("sweep", "mean", 0.5);
        tc.std_dev = cfg.get_double("sweep", "std", 0.05);
        tc.rho = cfg.get_double("sweep", "rho", 0.9);
        tc.keep_fraction = cfg.get_double("sweep", "keep_fraction", 0.3);
        tc.lambda = cfg.get_double("sweep", "lambda", 1e6);
        tc.restorations = static_cast<int>(cfg.get_int("sweep", "restorations", 8));
        tc.schedule = schedule_from_config(cfg);
        tc.seed = seed;
        const std::vector<TransformSweepRow> rows = transform_sweep(tc);

        std::string csv = "transform,mean_abs_error,max_abs_error,psnr_restored,psnr_observed\n";
        for (const TransformSweepRow& row : rows)
            csv += std::string(to_string(row.kind)) + "," + format_double(row.mean_abs_error) +
                   "," + format_double(row.max_abs_error) + "," +
                   format_double(row.psnr_restored) + "," + format_double(row.psnr_observed) +
                   "\n";
        out.write_text("sweep_transforms.csv", csv);
    }

    finish_manifest("sweep", cfg, seed, {}, out, start);
    return 0;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(const ConfigFile& cfg) {
    const auto start = Clock::now();
    const std::uint64_t seed = cfg.get_uint("run", "seed", 0);
    OutputSet out{cfg.get_string("run", "out_dir", "out"), {}};
    fs::create_directories(out.dir);

    const std::string candidate_dir = cfg.get_string("eval", "candidate_dir", "");
    const std::string reference_dir = cfg.get_string("eval", "reference_dir", "");
    if (candidate_dir.empty() || reference_dir.empty())
        throw std::runtime_error("eval: candidate_dir and reference_dir must be set");

    std::vector<std::pair<std::string, std::string>> inputs;
    std::string csv = "image_id,mask_kind,transform,mode,psnr_db,ssim,seed,wall_time_s\n";
    int evaluated = 0;
    for (const std::string& cand : png_files_in(candidate_dir)) {
        const fs::path ref = fs::path(reference_dir) / fs::path(cand).filename();
        if (!fs::exists(ref)) continue;
        const auto pair_start = Clock::now();
        const ImageTensor candidate = load_png(cand);
        const ImageTensor reference = load_png(ref.string());
        const MetricReport report = safe_metrics(candidate, reference);
        const double pair_time = std::chrono::duration<double>(Clock::now() - pair_start).count();
        inputs.emplace_back(cand, fnv1a_file(cand));
        inputs.emplace_back(ref.string(), fnv1a_file(ref.string()));
        csv += stem_of(cand) + ",-,-,-," + format_double(report.psnr_db) + "," +
               format_double(report.ssim) + "," + std::to_string(seed) + "," +
               format_double(pair_time) + "\n";
        ++evaluated;
    }
    if (evaluated == 0) throw std::runtime_error("eval: no matching image pairs found");
    out.write_text("metrics.csv", csv);

    finish_manifest("eval", cfg, seed, inputs, out, start);
    return 0;
}

// ---------------------------------------------------------------------------
// dispatch

int run_command(const std::string& command, const ConfigFile& cfg) {
    if (command == "train") return run_train(cfg);
    if (command == "restore") return run_restore(cfg);
    if (command == "generate") return run_generate(cfg);
    if (command == "sweep") return run_sweep(cfg);
    if (command == "eval") return run_eval(cfg);
    throw std::runtime_error("unknown command in manifest: " + command);
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string mode;
    std::string transform;
    double lambda = 0.0;
    std::string mask;
    double keep_fraction = 0.0;
    bool snapshots = false;

    CLI::Option* out_dir_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* transform_opt = nullptr;
    CLI::Option* lambda_opt = nullptr;
    CLI::Option* mask_opt = nullptr;
    CLI::Option* keep_opt = nullptr;
    CLI::Option* snapshots_opt = nullptr;
};

void add_common_flags(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config_path, "configuration file")->required();
    f.out_dir_opt = sub->add_option("--out-dir", f.out_dir, "output directory");
    f.seed_opt = sub->add_option("--seed", f.seed, "base RNG seed");
    f.mode_opt = sub->add_option("--mode", f.mode, "basic or progressive");
    f.transform_opt =
        sub->add_option("--transform", f.transform, "identity, copy, pool, or dwt");
    f.lambda_opt = sub->add_option("--lambda", f.lambda, "data-fidelity weight");
    f.mask_opt = sub->add_option("--mask", f.mask, "bayer, block, random, or file");
    f.keep_opt = sub->add_option("--keep-fraction", f.keep_fraction,
                                 "kept-pixel fraction for random masks");
    f.snapshots_opt = sub->add_flag("--snapshots", f.snapshots, "save per-level snapshots");
}

ConfigFile resolve_config(const CommonFlags& f) {
    ConfigFile cfg = ConfigFile::parse_file(f.config_path);
    if (f.out_dir_opt->count()) cfg.set("run", "out_dir", f.out_dir);
    if (f.seed_opt->count()) cfg.set("run", "seed", std::to_string(f.seed));
    if (f.mode_opt->count()) cfg.set("restore", "mode", f.mode);
    if (f.transform_opt->count()) cfg.set("restore", "transform", f.transform);
    if (f.lambda_opt->count()) cfg.set("restore", "lambda", format_double(f.lambda));
    if (f.mask_opt->count()) cfg.set("degradation", "mask", f.mask);
    if (f.keep_opt->count())
        cfg.set("degradation", "keep_fraction", format_double(f.keep_fraction));
    if (f.snapshots_opt->count()) cfg.set("restore", "snapshots", "true");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"score-prior image restoration toolkit"};
    app.require_subcommand(1);

    CommonFlags train_flags, restore_flags, generate_flags, sweep_flags, eval_flags;
    add_common_flags(app.add_subcommand("train", "train a score model"), train_flags);
    add_common_flags(app.add_subcommand("restore", "restore degraded images"), restore_flags);
    add_common_flags(app.add_subcommand("generate", "sample images from a model"),
                     generate_flags);
    add_common_flags(app.add_subcommand("sweep", "run trend experiments"), sweep_flags);
    add_common_flags(app.add_subcommand("eval", "compute metrics on image pairs"), eval_flags);

    std::string rerun_manifest;
    std::string rerun_out_dir;
    CLI::App* rerun = app.add_subcommand("rerun", "replay a recorded manifest");
    rerun->add_option("manifest", rerun_manifest, "manifest.json of a previous run")->required();
    CLI::Option* rerun_out_opt =
        rerun->add_option("--out-dir", rerun_out_dir, "override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "rerun") {
            const RunManifest manifest = read_manifest(rerun_manifest);
            ConfigFile cfg;
            cfg.replace_sections(manifest.config);
            if (rerun_out_opt->count()) cfg.set("run", "out_dir", rerun_out_dir);
            return run_command(manifest.command, cfg);
        }
        const CommonFlags& flags = name == "train"      ? train_flags
                                   : name == "restore"  ? restore_flags
                                   : name == "generate" ? generate_flags
                                   : name == "sweep"    ? sweep_flags
                                                        : eval_flags;
        return run_command(name, resolve_config(flags));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
