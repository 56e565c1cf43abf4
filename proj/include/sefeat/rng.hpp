#pragma once

#include <cstdint>

namespace sefeat {

/// SplitMix64 (Steele, Lea & Flood 2014). The state advances by the 64-bit
/// golden-ratio constant 0x9E3779B97F4A7C15 and each output is the state
/// passed through mix64(). Used for every seeded stream in the project so
/// synthetic corpora are reproducible from the algorithm alone.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1) from the top 53 bits.
    constexpr double next_double() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, bound) by rejection; bound must be > 0.
    constexpr std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next();
        while (x >= limit) {
            x = next();
        }
        return x % bound;
    }

    using result_type = std::uint64_t;
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    constexpr result_type operator()() noexcept { return next(); }

private:
    std::uint64_t state_;
};

/// Child seed for stream `index` of `parent`: mix64(parent + (index + 1) * golden).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return SplitMix64::mix64(parent + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace sefeat
