#include "hgm/schedule.hpp"

#include <cmath>

namespace hgm {

NoiseSchedule make_noise_schedule(double sigma_first, double sigma_last, int levels,
                                  double epsilon, int steps) {
    if (!(sigma_first > 0.0) || !(sigma_last > 0.0)) {
        throw std::invalid_argument("make_noise_schedule: sigma levels must be positive");
    }
    if (sigma_last > sigma_first) {
        throw std::invalid_argument("make_noise_schedule: sigma_last must not exceed sigma_first");
    }
    if (levels < 1) {
        throw std::invalid_argument("make_noise_schedule: levels must be >= 1");
    }
    if (levels == 1 && sigma_first != sigma_last) {
        throw std::invalid_argument("make_noise_schedule: levels == 1 requires sigma_first == sigma_last");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("make_noise_schedule: epsilon must be positive");
    }
    if (steps < 1) {
        throw std::invalid_argument("make_noise_schedule: steps must be positive");
    }

    NoiseSchedule s;
    s.epsilon = epsilon;
    s.steps_per_level = steps;
    s.sigmas.resize(static_cast<std::size_t>(levels));
    if (levels == 1) {
        s.sigmas[0] = sigma_first;
        return s;
    }
    const double log_first = std::log(sigma_first);
    const double log_last = std::log(sigma_last);
    for (int i = 0; i < levels; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(levels - 1);
        s.sigmas[static_cast<std::size_t>(i)] = std::exp(log_first + u * (log_last - log_first));
    }
    // Pin the endpoints exactly.
    s.sigmas.front() = sigma_first;
    s.sigmas.back() = sigma_last;
    return s;
}

double step_size(const NoiseSchedule& schedule, int level_index) {
    if (level_index < 0 || level_index >= schedule.levels()) {
        throw std::invalid_argument("step_size: level_index out of range");
    }
    const double si = schedule.sigma(level_index);
    const double sl = schedule.sigma_last();
    return schedule.epsilon * (si * si) / (sl * sl);
}

ImageTensor perturb(const ImageTensor& x, double sigma, Rng& rng) {
    if (sigma < 0.0) {
        throw std::invalid_argument("perturb: sigma must be non-negative");
    }
    if (sigma == 0.0) {
        return x;
    }
    ImageTensor out = x;
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : out.data) v += sigma * dist(rng);
    assert_finite(out, "perturb");
    return out;
}

}  // namespace hgm
