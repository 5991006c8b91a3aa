#pragma once

#include <cmath>
#include <cstdint>

namespace switchgrid {

// Counter-based stream: every output is a hash of (key, counter), so path j's
// draws depend only on (seed, j) and never on how many paths run or in what
// order. Mixing is the SplitMix64 finalizer.
class CounterRng {
  public:
    static CounterRng for_path(std::uint64_t seed, std::uint64_t path) {
        CounterRng r;
        r.key_ = mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ (path + 0xD1B54A32D192ED03ull));
        return r;
    }

    std::uint64_t next_u64() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ull); }

    // Uniform in (0, 1]: zero is excluded so logs stay finite.
    double next_uniform() {
        const std::uint64_t bits = next_u64() >> 11; // 53 bits
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes exactly two counters per call.
    double next_normal() {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace switchgrid
