#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace risopt {

// splitmix64 finalizer; mixes a base seed with a stream tag so that distinct
// subsystems (channels, agent init, exploration, replay sampling) get
// decorrelated-but-reproducible streams from one experiment seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream_a, std::uint64_t stream_b);

// mt19937_64 with hand-rolled uniform/normal mappings. The standard pins the
// engine output exactly but not the distributions, so all mappings from raw
// 64-bit draws are implemented here to keep runs bit-reproducible across
// standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer on [0, bound); bound must be > 0.
    std::uint64_t uniform_int(std::uint64_t bound);

    // Standard normal via Box-Muller (trig form, pairs cached).
    double normal();

    // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re * kInvSqrt2, im * kInvSqrt2};
    }

  private:
    static constexpr double kInvSqrt2 = 0.70710678118654752440;
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace risopt
