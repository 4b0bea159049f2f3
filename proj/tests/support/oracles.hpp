#ifndef MDWTNN_TESTS_ORACLES_HPP
#define MDWTNN_TESTS_ORACLES_HPP

// Independent reference computations used by the test suites. Everything in
// here deliberately avoids the library's FFT and SVD paths: the DFT is the
// quadratic textbook sum, singular values come from a real symmetric Jacobi
// eigensolver on the embedded Gram matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "mdwtnn/cube.hpp"
#include "mdwtnn/linalg.hpp"
#include "mdwtnn/rng.hpp"

namespace oracles {

using mdwtnn::CMatrix;
using mdwtnn::Cube;
using mdwtnn::SpectralCube;
using cplx = std::complex<double>;

inline std::vector<cplx> dft_direct(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                               static_cast<double>(n);
            acc += x[t] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

inline SpectralCube fft_mode3_direct(const Cube& x) {
    const auto [n1, n2, n3] = x.dims;
    SpectralCube out(n1, n2, n3);
    std::vector<cplx> tube(n3);
    for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t k = 0; k < n3; ++k) tube[k] = x(i, j, k);
            auto f = dft_direct(tube);
            for (std::size_t k = 0; k < n3; ++k) out(i, j, k) = f[k];
        }
    return out;
}

// Eigenvalues of a real symmetric matrix (flat row-major), descending.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    double scale = 0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0) return std::vector<double>(n, 0.0);
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(p, q)));
        if (off < 1e-14 * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double zeta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = at(i, p), aiq = at(i, q);
                    at(i, p) = c * aip - s * aiq;
                    at(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = at(p, i), aqi = at(q, i);
                    at(p, i) = c * api - s * aqi;
                    at(q, i) = s * api + c * aqi;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

// Singular values of a complex matrix, descending, via the Jordan-Wielandt
// matrix [[0, A^H], [A, 0]] (Hermitian, eigenvalues are +/- the singular
// values, so small ones keep full absolute accuracy) embedded as a real
// symmetric matrix [[Re, -Im], [Im, Re]] (each eigenvalue doubled).
inline std::vector<double> singular_values(const CMatrix& m) {
    const std::size_t rows = m.rows, cols = m.cols;
    const std::size_t d = rows + cols;
    std::vector<cplx> jw(d * d, cplx{});
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) {
            jw[j * d + (cols + i)] = std::conj(m(i, j)); // upper-right block A^H
            jw[(cols + i) * d + j] = m(i, j);            // lower-left block A
        }
    std::vector<double> emb(4 * d * d, 0.0);
    auto put = [&](std::size_t i, std::size_t j, double v) { emb[i * 2 * d + j] = v; };
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const cplx g = jw[i * d + j];
            put(i, j, g.real());
            put(i, j + d, -g.imag());
            put(i + d, j, g.imag());
            put(i + d, j + d, g.real());
        }
    auto eig = symmetric_eigenvalues(std::move(emb), 2 * d);
    const std::size_t l = std::min(rows, cols);
    std::vector<double> sv(l);
    for (std::size_t i = 0; i < l; ++i) sv[i] = std::max(0.0, eig[2 * i]);
    return sv;
}

inline double nuclear_norm(const CMatrix& m) {
    auto sv = singular_values(m);
    double s = 0;
    for (double v : sv) s += v;
    return s;
}

// sum of singular values beyond the first r
inline double pssv(const CMatrix& m, std::size_t r) {
    auto sv = singular_values(m);
    double s = 0;
    for (std::size_t i = r; i < sv.size(); ++i) s += sv[i];
    return s;
}

inline Cube random_cube(std::size_t n1, std::size_t n2, std::size_t n3, mdwtnn::PortableRng& rng,
                        double lo = 0.0, double hi = 1.0) {
    Cube x(n1, n2, n3);
    for (auto& v : x.values) v = rng.uniform(lo, hi);
    return x;
}

inline CMatrix random_matrix(std::size_t rows, std::size_t cols, mdwtnn::PortableRng& rng) {
    CMatrix m(rows, cols);
    for (auto& v : m.data) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return m;
}

inline CMatrix slice_as_matrix(const SpectralCube& xb, std::size_t k) {
    CMatrix m(xb.dims.n1, xb.dims.n2);
    const cplx* src = xb.slice(k);
    std::copy(src, src + m.rows * m.cols, m.data.begin());
    return m;
}

// Sum of rank terms a_r (x) b_r (x) c_r. Every mode-3 frequency slice of the
// result is a sum of `rank` rank-one matrices, so the tubal rank is at most
// `rank` in every orientation.
inline Cube cp_cube(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t rank,
                    mdwtnn::PortableRng& rng) {
    Cube x(n1, n2, n3);
    for (std::size_t r = 0; r < rank; ++r) {
        std::vector<double> a(n1), b(n2), c(n3);
        for (auto& v : a) v = rng.uniform(-1.0, 1.0);
        for (auto& v : b) v = rng.uniform(-1.0, 1.0);
        for (auto& v : c) v = rng.uniform(-1.0, 1.0);
        for (std::size_t k = 0; k < n3; ++k)
            for (std::size_t j = 0; j < n2; ++j)
                for (std::size_t i = 0; i < n1; ++i) x(i, j, k) += a[i] * b[j] * c[k];
    }
    return x;
}

// CP cube of the given tubal rank rescaled into [lo, hi]; the shift rides on
// a rank-one all-ones component, so the bound on the tubal rank still holds.
inline Cube low_rank_unit_cube(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t rank,
                               mdwtnn::PortableRng& rng, double lo = 0.05, double hi = 0.95) {
    Cube x = cp_cube(n1, n2, n3, rank > 0 ? rank - 1 : 0, rng);
    double vmin = x.values[0], vmax = x.values[0];
    for (double v : x.values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    const double span = vmax > vmin ? vmax - vmin : 1.0;
    for (auto& v : x.values) v = lo + (hi - lo) * (v - vmin) / span;
    return x;
}

} // namespace oracles

#endif
