#pragma once

#include <cmath>
#include <cstdint>

namespace ccm {

// Counter-based splitmix64: draw i is mix(seed + (i+1)*GAMMA), so a stream
// is a pure function of (seed, counter) and replications can be re-derived
// independently of scheduling order.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // Stream for replication `index`: the key is a full mix of (seed, index)
    // so that nearby seeds and nearby indices give unrelated streams.
    static CounterRng stream(std::uint64_t seed, std::uint64_t index) {
        return CounterRng(mix(seed + (index + 1) * 0x9E3779B97F4A7C15ull));
    }

    std::uint64_t next_u64() { return mix(seed_ + (++n_) * 0x9E3779B97F4A7C15ull); }

    // Strictly inside (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unit-rate exponential.
    double exponential() { return -std::log(uniform()); }

    // Standard normal, Box-Muller; consumes two uniforms per value.
    double normal() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t n_ = 0;
};

}  // namespace ccm
