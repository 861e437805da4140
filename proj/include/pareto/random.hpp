#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pareto {

// Deterministic random streams. The distributions are written out here rather
// than taken from <random> because the standard leaves their algorithms to the
// implementation; the engine itself (mt19937_64) is fully specified.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    // Independent stream for (master seed, tag, index).
    static Stream derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0)
    {
        std::uint64_t h = mix(seed ^ 0x6a09e667f3bcc909ULL);
        h = mix(h ^ (tag * 0x9e3779b97f4a7c15ULL));
        h = mix(h ^ (index + 0xbb67ae8584caa73bULL));
        return Stream(h);
    }

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal (Box-Muller, no cached pair).
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

// Stream tags, one per consumer, so that adding a consumer never shifts another.
namespace stream_tag {
inline constexpr std::uint64_t sampling = 1;
inline constexpr std::uint64_t inactive = 2;
inline constexpr std::uint64_t stretch = 3;
inline constexpr std::uint64_t multistart = 4;
inline constexpr std::uint64_t conditional = 5;
inline constexpr std::uint64_t jitter = 6;
inline constexpr std::uint64_t endpoints = 7;
inline constexpr std::uint64_t validate = 8;
} // namespace stream_tag

} // namespace pareto
