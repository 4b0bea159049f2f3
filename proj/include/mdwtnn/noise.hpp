#ifndef MDWTNN_NOISE_HPP
#define MDWTNN_NOISE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <variant>
#include <vector>

#include "mdwtnn/cube.hpp"
#include "mdwtnn/rng.hpp"

namespace mdwtnn {

// Noise level for one ingredient, either shared by all bands or drawn
// per band from a uniform range.
struct Fixed {
    double value = 0.0;
};
struct PerBandUniform {
    double lo = 0.0, hi = 0.0;
};
using Level = std::variant<Fixed, PerBandUniform>;

struct NoiseSpec {
    Level gaussian{Fixed{0.0}}; // standard deviation on [0,1]-scaled data
    Level impulse{Fixed{0.0}};  // fraction of pixels replaced per band
    std::uint64_t seed = 0;
    bool clip = false; // clamp the noisy cube back into [0,1]
};

namespace detail {

inline void validate_level(const Level& lv, double lo_bound, double hi_bound, const char* what) {
    const auto check = [&](double v) {
        if (!(v >= lo_bound && v <= hi_bound))
            throw UsageError(std::string(what) + " level out of range");
    };
    if (const auto* f = std::get_if<Fixed>(&lv)) {
        check(f->value);
    } else {
        const auto& u = std::get<PerBandUniform>(lv);
        check(u.lo);
        check(u.hi);
        if (u.lo > u.hi) throw UsageError(std::string(what) + " range is inverted");
    }
}

} // namespace detail

inline void validate(const NoiseSpec& spec) {
    detail::validate_level(spec.gaussian, 0.0, std::numeric_limits<double>::infinity(),
                           "gaussian");
    detail::validate_level(spec.impulse, 0.0, 1.0, "impulse");
}

struct BandLevel {
    double sigma = 0.0;
    double impulse_fraction = 0.0;
};

// The per-band noise levels actually used by apply_noise. Band b consumes,
// from its own stream (seed, band index), first the sigma draw, then the
// impulse-fraction draw, each only when the corresponding level is ranged.
inline std::vector<BandLevel> band_levels(const NoiseSpec& spec, std::size_t n3) {
    validate(spec);
    std::vector<BandLevel> levels(n3);
    for (std::size_t b = 0; b < n3; ++b) {
        PortableRng rng = PortableRng::stream(spec.seed, b);
        if (const auto* f = std::get_if<Fixed>(&spec.gaussian)) {
            levels[b].sigma = f->value;
        } else {
            const auto& u = std::get<PerBandUniform>(spec.gaussian);
            levels[b].sigma = rng.uniform(u.lo, u.hi);
        }
        if (const auto* f = std::get_if<Fixed>(&spec.impulse)) {
            levels[b].impulse_fraction = f->value;
        } else {
            const auto& u = std::get<PerBandUniform>(spec.impulse);
            levels[b].impulse_fraction = rng.uniform(u.lo, u.hi);
        }
    }
    return levels;
}

// Band-by-band mixed noise: i.i.d. Gaussian first, then exactly
// round(P_b * n1 * n2) pixels (chosen without replacement by a partial
// Fisher-Yates shuffle) replaced with 0 or 1, equally likely. Draw order per
// band stream: level draws, n1*n2 normals in element order, the shuffle
// indices, then one uniform per replaced pixel.
inline Cube apply_noise(const Cube& x, const NoiseSpec& spec) {
    validate(spec);
    const auto [n1, n2, n3] = x.dims;
    const std::size_t band_len = n1 * n2;
    Cube out = x;

    for (std::size_t b = 0; b < n3; ++b) {
        PortableRng rng = PortableRng::stream(spec.seed, b);
        BandLevel lv;
        if (const auto* f = std::get_if<Fixed>(&spec.gaussian)) {
            lv.sigma = f->value;
        } else {
            const auto& u = std::get<PerBandUniform>(spec.gaussian);
            lv.sigma = rng.uniform(u.lo, u.hi);
        }
        if (const auto* f = std::get_if<Fixed>(&spec.impulse)) {
            lv.impulse_fraction = f->value;
        } else {
            const auto& u = std::get<PerBandUniform>(spec.impulse);
            lv.impulse_fraction = rng.uniform(u.lo, u.hi);
        }

        double* band = out.slice(b);
        if (lv.sigma > 0) {
            for (std::size_t t = 0; t < band_len; ++t) band[t] += lv.sigma * rng.normal();
        } else {
            for (std::size_t t = 0; t < band_len; ++t) (void)rng.normal();
        }

        const std::size_t m = static_cast<std::size_t>(
            std::llround(lv.impulse_fraction * static_cast<double>(band_len)));
        if (m > 0) {
            std::vector<std::size_t> idx(band_len);
            std::iota(idx.begin(), idx.end(), 0);
            for (std::size_t t = 0; t < m; ++t) {
                const std::size_t j = t + rng.uniform_index(band_len - t);
                std::swap(idx[t], idx[j]);
            }
            for (std::size_t t = 0; t < m; ++t)
                band[idx[t]] = rng.uniform01() < 0.5 ? 0.0 : 1.0;
        }

        if (spec.clip)
            for (std::size_t t = 0; t < band_len; ++t) band[t] = std::clamp(band[t], 0.0, 1.0);
    }
    return out;
}

// The five simulated mixed-noise cases: G is the Gaussian standard deviation,
// P the impulse fraction.
inline NoiseSpec case_spec(int case_id, std::uint64_t seed) {
    NoiseSpec spec;
    spec.seed = seed;
    switch (case_id) {
    case 1: spec.gaussian = Fixed{0.1}; spec.impulse = Fixed{0.2}; break;
    case 2: spec.gaussian = Fixed{0.2}; spec.impulse = Fixed{0.2}; break;
    case 3: spec.gaussian = Fixed{0.1}; spec.impulse = Fixed{0.4}; break;
    case 4: spec.gaussian = PerBandUniform{0.1, 0.2}; spec.impulse = Fixed{0.2}; break;
    case 5: spec.gaussian = Fixed{0.1}; spec.impulse = PerBandUniform{0.2, 0.4}; break;
    default: throw UsageError("unknown noise case id (expected 1..5)");
    }
    return spec;
}

} // namespace mdwtnn

#endif
