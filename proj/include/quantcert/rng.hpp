#pragma once

#include <cstdint>
#include <limits>

namespace quantcert {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of a key.
constexpr double unit_double(std::uint64_t key) noexcept {
    return static_cast<double>(key >> 11) * 0x1.0p-53;
}

/// SplitMix64 stream usable with <random> distributions. One is created per
/// trial from SeedSpec::trial_key, so construction must stay cheap.
class TrialRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr TrialRng(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        const std::uint64_t out = mix64(state_);
        state_ += 0x9e3779b97f4a7c15ULL;
        return out;
    }

    constexpr double uniform() noexcept { return unit_double((*this)()); }

private:
    std::uint64_t state_;
};

}  // namespace quantcert
