#ifndef MDWTNN_WEIGHTS_HPP
#define MDWTNN_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mdwtnn/cube.hpp"
#include "mdwtnn/fft.hpp"
#include "mdwtnn/linalg.hpp"
#include "mdwtnn/parallel.hpp"

namespace mdwtnn {

// log-energy regularizer and denominator clamp for the frequency weights.
// The clamp bounds w_k in (c2, c1/freq_weight_clamp + c2] and keeps the
// formula defined for zero-energy slices.
inline constexpr double freq_weight_eps = 1e-10;
inline constexpr double freq_weight_clamp = 1e-2;

enum class TruncRule {
    max_ratio,    // count singular values strictly above eta * max
    energy_ratio, // smallest r with sum of the r largest >= (1 - eta) * total
    none,         // all counts zero
};

struct WeightParams {
    double c1 = 1.0;
    double c2 = 0.1;
    double eta = 0.05;
    TruncRule trunc_rule = TruncRule::max_ratio;
    bool uniform_freq = false; // w_k = 1 for every slice (baseline mode)
    int threads = 1;
};

// Per-mode frequency weights and truncation counts. Index p-1 holds the
// vectors for mode p; their length is the permuted third dimension.
struct WeightPlan {
    std::vector<double> freq_weights[3];
    std::vector<std::size_t> trunc_counts[3];
    WeightParams params;
};

// w_k = c1 / max(log(e_k + eps), clamp) + c2 with e_k the squared Frobenius
// energy of frequency slice k.
inline std::vector<double> frequency_weights(const SpectralCube& xb, double c1, double c2) {
    if (c1 <= 0) throw UsageError("frequency_weights: c1 must be positive");
    if (c2 < 0) throw UsageError("frequency_weights: c2 must be non-negative");
    const std::size_t n3 = xb.dims.n3;
    const std::size_t slice_len = xb.dims.n1 * xb.dims.n2;
    std::vector<double> w(n3);
    for (std::size_t k = 0; k < n3; ++k) {
        const cplx* s = xb.slice(k);
        double energy = 0;
        for (std::size_t t = 0; t < slice_len; ++t) energy += std::norm(s[t]);
        const double denom = std::max(std::log(energy + freq_weight_eps), freq_weight_clamp);
        w[k] = c1 / denom + c2;
    }
    return w;
}

namespace detail {

inline std::size_t count_by_rule(const std::vector<double>& s, double eta, TruncRule rule) {
    if (s.empty()) return 0;
    switch (rule) {
    case TruncRule::none: return 0;
    case TruncRule::max_ratio: {
        const double threshold = s.front() * eta; // s sorted descending
        std::size_t count = 0;
        for (double v : s)
            if (v > threshold) ++count;
        return count;
    }
    case TruncRule::energy_ratio: {
        double total = 0;
        for (double v : s) total += v;
        if (total == 0) return 0;
        double acc = 0;
        for (std::size_t r = 0; r < s.size(); ++r) {
            acc += s[r];
            if (acc >= (1.0 - eta) * total) return r + 1;
        }
        return s.size();
    }
    }
    return 0;
}

inline CMatrix spectral_slice(const SpectralCube& xb, std::size_t k) {
    CMatrix m(xb.dims.n1, xb.dims.n2);
    const cplx* src = xb.slice(k);
    std::copy(src, src + m.data.size(), m.data.begin());
    return m;
}

} // namespace detail

// Per-slice truncation counts TW(k) of the mode-3 spectrum of y: the number
// of singular values strictly above eta times the slice maximum. A zero
// slice truncates nothing.
inline std::vector<std::size_t> truncation_weights(const Cube& y, double eta,
                                                   TruncRule rule = TruncRule::max_ratio,
                                                   int threads = 1) {
    if (!(eta > 0.0 && eta < 1.0) && rule != TruncRule::none)
        throw UsageError("truncation_weights: eta must lie in (0,1)");
    const SpectralCube xb = fft_mode3(y);
    const std::size_t n3 = xb.dims.n3;
    std::vector<std::size_t> tw(n3, 0);
    if (rule == TruncRule::none) return tw;

    // conjugate slice pairs share singular values; compute half, mirror the rest
    const std::size_t half = n3 / 2 + 1;
    parallel_for(half, threads, [&](std::size_t k) {
        SvdFactors f = svd_complex(detail::spectral_slice(xb, k));
        tw[k] = detail::count_by_rule(f.s, eta, rule);
    });
    for (std::size_t k = half; k < n3; ++k) tw[k] = tw[n3 - k];
    return tw;
}

inline WeightPlan build_weight_plan(const Cube& y, const WeightParams& params) {
    WeightPlan plan;
    plan.params = params;
    for (int p = 1; p <= 3; ++p) {
        const Cube yp = permute_mode(y, mode_from_int(p));
        if (params.uniform_freq) {
            plan.freq_weights[p - 1].assign(yp.dims.n3, 1.0);
        } else {
            plan.freq_weights[p - 1] = frequency_weights(fft_mode3(yp), params.c1, params.c2);
        }
        plan.trunc_counts[p - 1] =
            truncation_weights(yp, params.eta, params.trunc_rule, params.threads);
    }
    return plan;
}

} // namespace mdwtnn

#endif
