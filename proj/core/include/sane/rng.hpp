#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace sane {

/// Portable pseudo-random stream (xoshiro256**, seeded through splitmix64).
///
/// Every draw is defined bit-for-bit here instead of going through the
/// <random> distributions, whose output differs between standard libraries.
/// Runs seeded identically therefore replay identically on every platform.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0);

    /// Stream for a labelled purpose, independent of any other label/counter.
    static Rng derive(std::uint64_t root_seed, std::string_view label, std::uint64_t counter = 0);

    /// Child stream; advances this stream by one draw.
    Rng split(std::string_view label);

    std::uint64_t next();
    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

    /// Uniform integer in [lo, hi] (inclusive, unbiased).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n);
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();
    bool bernoulli(double p);
    /// Index drawn proportionally to non-negative weights. At least one weight must be positive.
    std::size_t weighted(std::span<const double> weights);

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

    std::array<std::uint64_t, 4> state() const { return state_; }
    void set_state(const std::array<std::uint64_t, 4>& state) { state_ = state; }

private:
    std::array<std::uint64_t, 4> state_{};
};

/// 64-bit FNV-1a, used for labels and content digests.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace sane
