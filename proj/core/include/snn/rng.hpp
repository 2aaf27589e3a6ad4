#pragma once

#include <cstdint>

namespace snn {

// Counter-based random streams. A stream is identified by a key derived from
// (seed, tag, a, b); the i-th output is a pure function of (key, i), so any
// rank can replay any neuron's stream without coordination.

enum class StreamTag : std::uint64_t {
    kSynapses = 0x73796e00,  // "syn"
    kExternal = 0x65787400,  // "ext"
    kInitial = 0x696e6900,   // "ini"
};

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, StreamTag tag, std::uint64_t a,
                                   std::uint64_t b = 0) noexcept {
    std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    k = mix64(k ^ static_cast<std::uint64_t>(tag));
    k = mix64(k ^ (a + 0x9e3779b97f4a7c15ULL));
    k = mix64(k ^ (b + 0xbb67ae8584caa73bULL));
    return k;
}

class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
    constexpr CounterRng(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b = 0) noexcept
        : key_(stream_key(seed, tag, a, b)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), unbiased (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Poisson-distributed count. Same algorithm on every platform, unlike
    /// std::poisson_distribution.
    std::uint64_t poisson(double mean) noexcept;

    /// Same draw with e^-mean supplied by the caller.
    std::uint64_t poisson(double mean, double exp_neg_mean) noexcept;

    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace snn
