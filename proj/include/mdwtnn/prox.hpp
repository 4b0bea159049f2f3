#ifndef MDWTNN_PROX_HPP
#define MDWTNN_PROX_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mdwtnn/cube.hpp"
#include "mdwtnn/fft.hpp"
#include "mdwtnn/linalg.hpp"
#include "mdwtnn/parallel.hpp"
#include "mdwtnn/weights.hpp"

namespace mdwtnn {

// Inputs to the double-weighted shrinkage: the prox strength tau (alpha_p /
// mu_p inside the solver), one frequency weight and one truncation count per
// frequency slice. Vector lengths must equal the cube's third dimension; the
// operator reads only the first floor(n3/2)+1 entries and mirrors the rest
// through conjugate symmetry.
struct ShrinkSpec {
    double tau = 0.0;
    std::vector<double> freq_weights;
    std::vector<std::size_t> trunc_counts;
};

namespace detail {

inline void check_spec(const Cube& y, const ShrinkSpec& spec) {
    if (spec.tau < 0) throw UsageError("dw_svt: tau must be non-negative");
    if (spec.freq_weights.size() != y.dims.n3 || spec.trunc_counts.size() != y.dims.n3)
        throw UsageError("dw_svt: weight vector length must equal the third dimension");
}

// Singular values of every frequency slice; the mirrored half reuses its
// conjugate partner's spectrum.
inline std::vector<std::vector<double>> slice_singular_values(const SpectralCube& xb,
                                                              int threads = 1) {
    const std::size_t n3 = xb.dims.n3;
    const std::size_t half = n3 / 2 + 1;
    std::vector<std::vector<double>> sv(n3);
    parallel_for(half, threads, [&](std::size_t k) {
        sv[k] = svd_complex(spectral_slice(xb, k)).s;
    });
    for (std::size_t k = half; k < n3; ++k) sv[k] = sv[n3 - k];
    return sv;
}

} // namespace detail

// Proximal operator of the double-weighted tensor norm: per frequency slice,
// the leading trunc_counts[k] singular values pass through untouched and the
// tail is soft-thresholded by tau * freq_weights[k]. Minimizes
// tau * dwtnn(X, w, tw) + (1/2)||X - Y||_F^2.
inline Cube dw_svt(const Cube& y, const ShrinkSpec& spec, int threads = 1) {
    detail::check_spec(y, spec);
    if (spec.tau == 0.0) return y;

    SpectralCube xb = fft_mode3(y);
    const auto [n1, n2, n3] = xb.dims;
    const std::size_t slice_len = n1 * n2;
    const std::size_t half = n3 / 2 + 1;

    parallel_for(half, threads, [&](std::size_t k) {
        SvdFactors f = svd_complex(detail::spectral_slice(xb, k));
        const double shrink = spec.tau * spec.freq_weights[k];
        for (std::size_t i = std::min(spec.trunc_counts[k], f.s.size()); i < f.s.size(); ++i)
            f.s[i] = std::max(f.s[i] - shrink, 0.0);
        CMatrix rec = reconstruct(f);
        std::copy(rec.data.begin(), rec.data.end(), xb.slice(k));
    });
    for (std::size_t k = half; k < n3; ++k) {
        const cplx* src = xb.slice(n3 - k);
        cplx* dst = xb.slice(k);
        for (std::size_t t = 0; t < slice_len; ++t) dst[t] = std::conj(src[t]);
    }
    return ifft_mode3(xb);
}

// Tensor nuclear norm, (1/n3) * sum of per-frequency-slice nuclear norms.
inline double tnn(const Cube& x, int threads = 1) {
    const auto sv = detail::slice_singular_values(fft_mode3(x), threads);
    double total = 0;
    for (const auto& s : sv)
        for (double v : s) total += v;
    return total / static_cast<double>(x.dims.n3);
}

// Frequency-weighted TNN: sum_k w_k * ||slice k||_*. Carries no 1/n3 factor.
inline double fwtnn(const Cube& x, const std::vector<double>& w, int threads = 1) {
    if (w.size() != x.dims.n3) throw UsageError("fwtnn: weight length must equal n3");
    const auto sv = detail::slice_singular_values(fft_mode3(x), threads);
    double total = 0;
    for (std::size_t k = 0; k < sv.size(); ++k) {
        double nuc = 0;
        for (double v : sv[k]) nuc += v;
        total += w[k] * nuc;
    }
    return total;
}

// Double-weighted TNN: (1/n3) * sum_k w_k * (tail singular values past tw[k]).
inline double dwtnn(const Cube& x, const std::vector<double>& w,
                    const std::vector<std::size_t>& tw, int threads = 1) {
    if (w.size() != x.dims.n3 || tw.size() != x.dims.n3)
        throw UsageError("dwtnn: weight vector length must equal n3");
    const auto sv = detail::slice_singular_values(fft_mode3(x), threads);
    double total = 0;
    for (std::size_t k = 0; k < sv.size(); ++k) {
        double tail = 0;
        for (std::size_t i = std::min(tw[k], sv[k].size()); i < sv[k].size(); ++i)
            tail += sv[k][i];
        total += w[k] * tail;
    }
    return total / static_cast<double>(x.dims.n3);
}

// alpha must be non-negative and sum to 1; zero entries are tolerated so the
// single-mode reductions stay expressible.
inline void validate_alpha(const std::array<double, 3>& alpha) {
    double sum = 0;
    for (double a : alpha) {
        if (a < 0 || !std::isfinite(a)) throw UsageError("alpha weights must be non-negative");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw UsageError("alpha weights must sum to 1");
}

// Multi-modal double-weighted TNN: weighted average of the per-mode dwtnn
// values over the three permutations.
inline double mdwtnn_norm(const Cube& x, const std::array<double, 3>& alpha,
                          const WeightPlan& plan, int threads = 1) {
    validate_alpha(alpha);
    double total = 0;
    for (int p = 1; p <= 3; ++p) {
        if (alpha[p - 1] == 0.0) continue;
        const Cube xp = permute_mode(x, mode_from_int(p));
        total += alpha[p - 1] * dwtnn(xp, plan.freq_weights[p - 1], plan.trunc_counts[p - 1], threads);
    }
    return total;
}

} // namespace mdwtnn

#endif
