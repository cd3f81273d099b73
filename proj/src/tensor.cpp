#include "hgm/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace hgm {

ImageTensor::ImageTensor(int h, int w, int c, double fill) {
    if (h <= 0 || w <= 0 || c <= 0) {
        throw std::invalid_argument("ImageTensor: dimensions must be positive");
    }
    height = h;
    width = w;
    channels = c;
    data.assign(static_cast<std::size_t>(h) * w * c, fill);
}

std::string ImageTensor::shape_string() const {
    return std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels);
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* where) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(where) + ": shape mismatch " + a.shape_string() +
                                    " vs " + b.shape_string());
    }
}

void assert_finite(const ImageTensor& t, const char* where) {
    for (double v : t.data) {
        if (!std::isfinite(v)) {
            throw std::runtime_error(std::string(where) + ": non-finite value in tensor");
        }
    }
}

ImageTensor clamp01(const ImageTensor& t) {
    ImageTensor out = t;
    for (double& v : out.data) v = std::clamp(v, 0.0, 1.0);
    return out;
}

double min_value(const ImageTensor& t) {
    return *std::min_element(t.data.begin(), t.data.end());
}

double max_value(const ImageTensor& t) {
    return *std::max_element(t.data.begin(), t.data.end());
}

double mean_value(const ImageTensor& t) {
    double s = 0.0;
    for (double v : t.data) s += v;
    return s / static_cast<double>(t.size());
}

double variance_value(const ImageTensor& t) {
    const double m = mean_value(t);
    double s = 0.0;
    for (double v : t.data) s += (v - m) * (v - m);
    return s / static_cast<double>(t.size());
}

double squared_norm(const ImageTensor& t) {
    double s = 0.0;
    for (double v : t.data) s += v * v;
    return s;
}

double mean_squared_error(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "mean_squared_error");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

double max_abs_difference(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "max_abs_difference");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    }
    return m;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state ^= (stream + 1) * 0xd1342543de82ef95ULL;
    std::uint64_t b = splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

void fill_normal(ImageTensor& t, Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : t.data) v = dist(rng);
}

void fill_uniform(ImageTensor& t, Rng& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& v : t.data) v = dist(rng);
}

ImageTensor normal_like(const ImageTensor& t, Rng& rng) {
    ImageTensor z(t.height, t.width, t.channels);
    fill_normal(z, rng);
    return z;
}

}  // namespace hgm
