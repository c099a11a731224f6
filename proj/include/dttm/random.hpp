#pragma once

#include <cstdint>
#include <initializer_list>

namespace dttm {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based generator: output n of a stream is mix64(key + n * golden),
// where key hashes (seed, tag, indices...). Streams for different keys are
// independent of the order in which they are consumed.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) : key_(mix64(seed)) {
        for (auto p : path) key_ = mix64(key_ ^ mix64(p + 0x632BE59BD9B4E019ULL));
    }

    std::uint64_t next_u64() { return mix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (one output per two uniforms).
    double normal();

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace dttm
