#include "sparse_nlms/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "sparse_nlms/errors.hpp"

namespace sparse_nlms {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(parent);
    for (std::uint64_t label : path) s = splitmix64(s ^ splitmix64(label + 0x632BE59BD9B4E019ULL));
    return s;
}

ChannelRealization generate_channel(std::size_t n_taps, std::size_t sparsity,
                                    std::uint64_t seed) {
    if (n_taps == 0) throw ConfigError("channel length must be at least 1");
    if (sparsity == 0 || sparsity > n_taps) {
        throw ConfigError("sparsity " + std::to_string(sparsity) + " outside [1, " +
                          std::to_string(n_taps) + "]");
    }
    std::mt19937_64 rng(seed);

    // Partial Fisher-Yates: the first `sparsity` slots form the support.
    std::vector<std::size_t> index(n_taps);
    std::iota(index.begin(), index.end(), std::size_t{0});
    for (std::size_t i = 0; i < sparsity; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n_taps - 1);
        std::swap(index[i], index[pick(rng)]);
    }
    ChannelRealization ch;
    ch.support.assign(index.begin(), index.begin() + static_cast<std::ptrdiff_t>(sparsity));
    std::sort(ch.support.begin(), ch.support.end());

    ch.taps.assign(n_taps, 0.0);
    std::normal_distribution<double> gain(0.0, 1.0);
    double norm2 = 0.0;
    for (std::size_t pos : ch.support) {
        double g = 0.0;
        while (g == 0.0) g = gain(rng);
        ch.taps[pos] = g;
        norm2 += g * g;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (std::size_t pos : ch.support) ch.taps[pos] *= scale;
    return ch;
}

double observe(const ChannelRealization& channel, std::span<const double> regressor,
               double noise_power, double noise_draw) {
    if (regressor.size() != channel.taps.size()) {
        throw DimensionError("regressor length " + std::to_string(regressor.size()) +
                             " does not match channel length " +
                             std::to_string(channel.taps.size()));
    }
    const double clean =
        std::inner_product(channel.taps.begin(), channel.taps.end(), regressor.begin(), 0.0);
    return clean + std::sqrt(noise_power) * noise_draw;
}

SampleStream::SampleStream(std::uint64_t seed, std::size_t n_taps, double noise_power,
                           double signal_power, std::size_t length)
    : seed_(seed), n_taps_(n_taps), noise_power_(noise_power), signal_power_(signal_power) {
    if (n_taps == 0) throw ConfigError("stream filter length must be at least 1");
    if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) {
        throw ConfigError("noise power must be finite and >= 0");
    }
    if (!(signal_power > 0.0) || !std::isfinite(signal_power)) {
        throw ConfigError("signal power must be finite and > 0");
    }

    const double amplitude = std::sqrt(signal_power);
    std::mt19937_64 training(derive_seed(seed, {static_cast<std::uint64_t>(Substream::Training)}));
    chips_.resize(length);
    for (double& c : chips_) c = (training() >> 63) ? amplitude : -amplitude;

    std::mt19937_64 noise(derive_seed(seed, {static_cast<std::uint64_t>(Substream::Noise)}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    noise_.resize(length);
    for (double& z : noise_) z = gauss(noise);
}

double SampleStream::chip(std::size_t t) const {
    if (t >= chips_.size()) throw std::out_of_range("chip index past stream length");
    return chips_[t];
}

double SampleStream::noise_draw(std::size_t t) const {
    if (t >= noise_.size()) throw std::out_of_range("noise index past stream length");
    return noise_[t];
}

std::vector<double> SampleStream::regressor_at(std::size_t t) const {
    std::vector<double> x(n_taps_);
    regressor_into(t, x);
    return x;
}

void SampleStream::regressor_into(std::size_t t, std::span<double> out) const {
    if (out.size() != n_taps_) throw DimensionError("regressor buffer has wrong length");
    if (t >= chips_.size()) throw std::out_of_range("regressor index past stream length");
    for (std::size_t i = 0; i < n_taps_; ++i) out[i] = i <= t ? chips_[t - i] : 0.0;
}

void SampleStream::sample_into(const ChannelRealization& channel, std::size_t t,
                               Sample& out) const {
    out.regressor.resize(n_taps_);
    regressor_into(t, out.regressor);
    out.observation = observe(channel, out.regressor, noise_power_, noise_draw(t));
}

}  // namespace sparse_nlms
