#pragma once

#include <cstdint>
#include <random>

namespace deskmon::synth {

/// Portable generator: std::mt19937_64 is specified bit-exactly, but the
/// standard distributions are not, so uniform and normal draws are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Inclusive bounds.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    bool bernoulli(double p) { return uniform() < p; }
    double normal(double mean, double sd);
    /// Rejection sampling on [lo, hi]; clamps after 64 rejections.
    double truncated_normal(double mean, double sd, double lo, double hi);
    /// Independent child generator for a numbered sub-stream.
    Rng fork(std::uint64_t stream) const;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer, used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace deskmon::synth
