#pragma once

#include <cstdint>

namespace marginlab {

struct Seed {
    std::uint64_t value = 0;
};

// Counter-based generator: draw k of stream s under seed v is a pure function
// of (v, s, k), so per-example streams give identical datasets no matter in
// which order (or on which thread) the examples are generated.
class CounterRng {
public:
    CounterRng(Seed seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;
    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    // Uniform on (0, 1]; safe for log().
    double uniform_open_low() noexcept;
    double normal() noexcept;
    // +1 or -1 with probability 1/2 each.
    double sign() noexcept;
    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

// Derives an independent seed for a named sub-task (e.g. one seed of a sweep).
Seed derive_seed(Seed parent, std::uint64_t tag) noexcept;

}  // namespace marginlab
