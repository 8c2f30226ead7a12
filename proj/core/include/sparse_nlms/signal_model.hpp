#ifndef SPARSE_NLMS_SIGNAL_MODEL_HPP
#define SPARSE_NLMS_SIGNAL_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "sparse_nlms/algorithms.hpp"

namespace sparse_nlms {

/// Deterministically derives a child seed from a parent seed and a path of
/// labels (splitmix64 chaining). Distinct paths give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path);

/// Labels for the per-trial substreams.
enum class Substream : std::uint64_t { Channel = 1, Training = 2, Noise = 3 };

/// Ground-truth sparse channel, normalized to unit l2 norm.
struct ChannelRealization {
    std::vector<double> taps;
    std::vector<std::size_t> support;  // ascending, size == sparsity

    std::size_t n_taps() const noexcept { return taps.size(); }
    std::size_t sparsity() const noexcept { return support.size(); }
};

/// K support positions drawn uniformly without replacement, Gaussian gains,
/// then scaled to unit norm. Throws ConfigError unless 1 <= sparsity <= n_taps.
ChannelRealization generate_channel(std::size_t n_taps, std::size_t sparsity,
                                    std::uint64_t seed);

/// y = h'x + sqrt(noise_power) * noise_draw.
double observe(const ChannelRealization& channel, std::span<const double> regressor,
               double noise_power, double noise_draw);

/// Seeded PN training sequence plus the matching standard-normal noise
/// draws. Chips are +-sqrt(signal_power); the regressor at time t is the
/// length-N window [x(t), x(t-1), ..., x(t-N+1)] with zeros before t = 0.
/// Chips and noise come from independent substreams of `seed`, so the noise
/// sequence does not depend on the filter length.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::size_t n_taps, double noise_power,
                 double signal_power, std::size_t length);

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t n_taps() const noexcept { return n_taps_; }
    std::size_t length() const noexcept { return chips_.size(); }
    double noise_power() const noexcept { return noise_power_; }
    double signal_power() const noexcept { return signal_power_; }

    double chip(std::size_t t) const;
    double noise_draw(std::size_t t) const;

    std::vector<double> regressor_at(std::size_t t) const;
    void regressor_into(std::size_t t, std::span<double> out) const;

    /// Regressor and noisy observation of `channel` at time t.
    void sample_into(const ChannelRealization& channel, std::size_t t, Sample& out) const;

private:
    std::uint64_t seed_;
    std::size_t n_taps_;
    double noise_power_;
    double signal_power_;
    std::vector<double> chips_;
    std::vector<double> noise_;
};

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_SIGNAL_MODEL_HPP
