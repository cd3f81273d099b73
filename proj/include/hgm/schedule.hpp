#pragma once

#include "hgm/tensor.hpp"

namespace hgm {

/// Geometric noise-level ladder driving training and annealed sampling.
struct NoiseSchedule {
    std::vector<double> sigmas;  // strictly decreasing geometric sequence
    double epsilon = 0.0;        // base Langevin step size
    int steps_per_level = 0;     // T

    int levels() const { return static_cast<int>(sigmas.size()); }
    double sigma(int i) const { return sigmas[static_cast<std::size_t>(i)]; }
    double sigma_last() const { return sigmas.back(); }
};

/// Builds sigmas[i] = sigma_first * (sigma_last/sigma_first)^(i/(levels-1)),
/// interpolated in log-space so the common ratio is exact to rounding.
NoiseSchedule make_noise_schedule(double sigma_first, double sigma_last, int levels,
                                  double epsilon, int steps);

/// Stock restoration ladder: 10 levels from 1 down to 0.01, base step
/// 2e-5, 80 iterations per level.
inline NoiseSchedule default_noise_schedule() {
    return make_noise_schedule(1.0, 0.01, 10, 2e-5, 80);
}

/// Per-level Langevin step size: epsilon * sigma_i^2 / sigma_L^2.
double step_size(const NoiseSchedule& schedule, int level_index);

/// Gaussian perturbation x + sigma * z with z i.i.d. standard normal.
ImageTensor perturb(const ImageTensor& x, double sigma, Rng& rng);

}  // namespace hgm
