#ifndef MDWTNN_RNG_HPP
#define MDWTNN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mdwtnn {

// Reproducibility contract: every random quantity in this project is a pure
// function of a 64-bit seed, fully pinned down by the rules below so that an
// independent implementation can replay the streams bit for bit.
//
//  * engine: std::mt19937_64 (output sequence specified by the C++ standard)
//  * stream splitting: stream i of master seed s runs on an engine seeded
//    with splitmix64(s + (i+1) * 0x9E3779B97F4A7C15)
//  * uniform in [0,1): (engine() >> 11) * 2^-53
//  * uniform in (0,1]: ((engine() >> 11) + 1) * 2^-53
//  * standard normal: Box-Muller on (u1, u2) = (open, half-open) uniforms,
//    z0 = sqrt(-2 ln u1) cos(2 pi u2) returned first, the sin twin cached
//  * integer in [0, bound): rejection on engine() below the largest multiple
//    of bound (no modulo bias)


inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64_mix(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    static PortableRng stream(std::uint64_t master, std::uint64_t index) {
        return PortableRng(stream_seed(master, index));
    }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform_open01() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t uniform_index(std::uint64_t bound) {
        // largest multiple of bound representable in 64 bits
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mdwtnn

#endif
