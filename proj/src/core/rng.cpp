#include "marginlab/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace marginlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(Seed seed, std::uint64_t stream) noexcept
    : key_(mix64(seed.value ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() noexcept {
    const std::uint64_t c = counter_++;
    return mix64(key_ + (c + 1) * kGolden);
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open_low() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
    const double u1 = uniform_open_low();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::sign() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    // Lemire's multiply-shift; bias is < bound / 2^64
    const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(m >> 64);
}

Seed derive_seed(Seed parent, std::uint64_t tag) noexcept {
    return Seed{mix64(parent.value + mix64(tag ^ 0xD1B54A32D192ED03ULL))};
}

}  // namespace marginlab
