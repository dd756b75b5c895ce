#pragma once

#include <cstdint>
#include <string_view>

namespace icsim::world {

std::uint64_t fnv1a(std::string_view text);

// SplitMix64 stream. Hand-rolled so trajectories are identical across
// compilers and standard libraries, which the lockstep replay guarantees
// depend on.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // [lo, hi] inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    bool coin() { return (next_u64() & 1) != 0; }

    // Independent child stream for a named component; device streams stay
    // stable when unrelated parts of the config change.
    Rng split(std::string_view label) const { return Rng(state_ ^ fnv1a(label)); }

  private:
    std::uint64_t state_;
};

}  // namespace icsim::world
