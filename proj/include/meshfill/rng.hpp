#pragma once

// Seeded random streams. Every draw goes through the raw 64-bit output of a
// fully specified engine so results are bit-identical across standard
// libraries (std::uniform_*_distribution is implementation-defined).

#include <cstdint>
#include <random>

namespace meshfill {

using Seed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent child seed for stream `index` of `master`.
constexpr Seed derive_seed(Seed master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Maps 64 random bits onto [0, 1).
constexpr double unit_from_bits(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless draw in [0, 1) keyed by (seed, a, b, c). Used where a value must
/// not depend on the order in which other values were drawn.
constexpr double keyed_unit(Seed seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    std::uint64_t h = splitmix64(seed ^ 0xD6E8FEB86659FD93ULL);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ (b * 0x9E3779B97F4A7C15ULL));
    h = splitmix64(h ^ (c + 0x2545F4914F6CDD1DULL));
    return unit_from_bits(h);
}

class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double unit() { return unit_from_bits(engine_()); }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform integer in [lo, hi], unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace meshfill
