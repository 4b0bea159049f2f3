#ifndef MDWTNN_LINALG_HPP
#define MDWTNN_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mdwtnn/errors.hpp"

namespace mdwtnn {

using cplx = std::complex<double>;

// Dense complex matrix, column-major.
struct CMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<cplx> data;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, cplx{}) {}

    cplx& operator()(std::size_t i, std::size_t j) { return data[i + rows * j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data[i + rows * j]; }
    cplx* col(std::size_t j) { return data.data() + rows * j; }
    const cplx* col(std::size_t j) const { return data.data() + rows * j; }

    CMatrix adjoint() const {
        CMatrix r(cols, rows);
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t i = 0; i < rows; ++i) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    static CMatrix identity(std::size_t n) {
        CMatrix r(n, n);
        for (std::size_t i = 0; i < n; ++i) r(i, i) = 1.0;
        return r;
    }
};

inline double frobenius_norm(const CMatrix& m) {
    double s = 0;
    for (const auto& v : m.data) s += std::norm(v);
    return std::sqrt(s);
}

// u: m x l, s: length l descending, v: n x l, with l = min(m, n) and
// input = u * diag(s) * v^H.
struct SvdFactors {
    CMatrix u;
    std::vector<double> s;
    CMatrix v;
};

inline CMatrix reconstruct(const SvdFactors& f) {
    const std::size_t m = f.u.rows, n = f.v.rows, l = f.s.size();
    CMatrix out(m, n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx* oc = out.col(j);
        for (std::size_t a = 0; a < l; ++a) {
            if (f.s[a] == 0.0) continue;
            const cplx w = f.s[a] * std::conj(f.v(j, a));
            const cplx* uc = f.u.col(a);
            for (std::size_t i = 0; i < m; ++i) oc[i] += w * uc[i];
        }
    }
    return out;
}

namespace detail {

// One-sided Jacobi on the columns of b (rows >= cols assumed by the caller).
// Accumulates the right factor in v. Caps at 100 sweeps with relative
// off-diagonal tolerance 1e-12.
inline void jacobi_sweeps(CMatrix& b, CMatrix& v) {
    constexpr int max_sweeps = 100;
    constexpr double tol = 1e-12;
    const std::size_t m = b.rows, n = b.cols;

    std::vector<double> csq(n); // cached squared column norms, refreshed per sweep
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            const cplx* c = b.col(j);
            for (std::size_t i = 0; i < m; ++i) s += std::norm(c[i]);
            csq[j] = s;
        }
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double a = csq[p], bb = csq[q];
                if (a == 0.0 || bb == 0.0) continue;
                cplx* bp = b.col(p);
                cplx* bq = b.col(q);
                cplx gamma{};
                for (std::size_t i = 0; i < m; ++i) gamma += std::conj(bp[i]) * bq[i];
                const double g = std::abs(gamma);
                if (g <= tol * std::sqrt(a * bb)) continue;

                // phase-rotate column q so the pair inner product becomes real
                const cplx phase = std::conj(gamma) / g;
                const double zeta = (bb - a) / (2.0 * g);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;

                for (std::size_t i = 0; i < m; ++i) {
                    const cplx xq = phase * bq[i];
                    const cplx xp = bp[i];
                    bp[i] = cs * xp - sn * xq;
                    bq[i] = sn * xp + cs * xq;
                }
                cplx* vp = v.col(p);
                cplx* vq = v.col(q);
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx xq = phase * vq[i];
                    const cplx xp = vp[i];
                    vp[i] = cs * xp - sn * xq;
                    vq[i] = sn * xp + cs * xq;
                }
                csq[p] = cs * cs * a + sn * sn * bb - 2.0 * cs * sn * g;
                csq[q] = sn * sn * a + cs * cs * bb + 2.0 * cs * sn * g;
                rotated = true;
            }
        }
        if (!rotated) return;
    }
    // measure what is left and report it
    double worst = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            double a = 0, bb = 0;
            cplx gamma{};
            for (std::size_t i = 0; i < m; ++i) {
                a += std::norm(b(i, p));
                bb += std::norm(b(i, q));
                gamma += std::conj(b(i, p)) * b(i, q);
            }
            if (a > 0 && bb > 0) worst = std::max(worst, std::abs(gamma) / std::sqrt(a * bb));
        }
    }
    throw SvdConvergenceError("svd_complex: Jacobi sweeps did not converge", worst);
}

// Orthonormal fill-in for null columns of u, Gram-Schmidt over basis vectors.
inline void fill_null_column(CMatrix& u, std::size_t col, std::size_t upto) {
    const std::size_t m = u.rows;
    for (std::size_t e = 0; e < m; ++e) {
        std::vector<cplx> cand(m, cplx{});
        cand[e] = 1.0;
        for (std::size_t j = 0; j < upto; ++j) {
            if (j == col) continue;
            cplx proj{};
            for (std::size_t i = 0; i < m; ++i) proj += std::conj(u(i, j)) * cand[i];
            for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * u(i, j);
        }
        double nrm = 0;
        for (const auto& c : cand) nrm += std::norm(c);
        nrm = std::sqrt(nrm);
        if (nrm > 0.5) {
            for (std::size_t i = 0; i < m; ++i) u(i, col) = cand[i] / nrm;
            return;
        }
    }
    throw NumericalError("svd_complex: failed to complete orthonormal basis");
}

} // namespace detail

// Complex SVD by one-sided Jacobi. Deterministic: fixed sweep order plus the
// sign convention that the first component of each left singular vector with
// modulus above 1e-12 is made real non-negative.
inline SvdFactors svd_complex(const CMatrix& a) {
    if (a.rows < a.cols) {
        SvdFactors f = svd_complex(a.adjoint());
        std::swap(f.u, f.v);
        // re-apply the sign convention to the swapped-in left vectors
        const std::size_t l = f.s.size();
        for (std::size_t j = 0; j < l; ++j) {
            for (std::size_t i = 0; i < f.u.rows; ++i) {
                const cplx val = f.u(i, j);
                if (std::abs(val) > 1e-12) {
                    const cplx ph = std::conj(val) / std::abs(val);
                    for (std::size_t r = 0; r < f.u.rows; ++r) f.u(r, j) *= ph;
                    for (std::size_t r = 0; r < f.v.rows; ++r) f.v(r, j) *= ph;
                    break;
                }
            }
        }
        return f;
    }

    const std::size_t m = a.rows, n = a.cols;
    CMatrix b = a;
    CMatrix v = CMatrix::identity(n);
    detail::jacobi_sweeps(b, v);

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        const cplx* c = b.col(j);
        for (std::size_t i = 0; i < m; ++i) s += std::norm(c[i]);
        sig[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    SvdFactors f;
    f.u = CMatrix(m, n);
    f.v = CMatrix(n, n);
    f.s.resize(n);
    const double smax = sig[order[0]];
    const double null_tol = (smax > 0 ? smax : 1.0) * 1e-14;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        f.s[j] = sig[src];
        for (std::size_t i = 0; i < n; ++i) f.v(i, j) = v(i, src);
        if (sig[src] > null_tol) {
            const double inv = 1.0 / sig[src];
            for (std::size_t i = 0; i < m; ++i) f.u(i, j) = b(i, src) * inv;
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        if (f.s[j] <= null_tol) detail::fill_null_column(f.u, j, n);

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            const cplx val = f.u(i, j);
            if (std::abs(val) > 1e-12) {
                const cplx ph = std::conj(val) / std::abs(val);
                for (std::size_t r = 0; r < m; ++r) f.u(r, j) *= ph;
                for (std::size_t r = 0; r < n; ++r) f.v(r, j) *= ph;
                break;
            }
        }
    }
    return f;
}

inline double soft_threshold(double x, double t) {
    const double mag = std::abs(x) - t;
    return mag > 0 ? std::copysign(mag, x) : 0.0;
}

// Partial singular value thresholding: keep the r largest singular values,
// soft-threshold the tail by t. Exact minimizer of
// (1/2)||X - Y||_F^2 + t * sum_{i>r} sigma_i(X).
inline CMatrix psvt(const CMatrix& y, double t, std::size_t r) {
    if (t < 0) throw UsageError("psvt: threshold must be non-negative");
    SvdFactors f = svd_complex(y);
    const std::size_t l = f.s.size();
    for (std::size_t i = std::min(r, l); i < l; ++i) f.s[i] = soft_threshold(f.s[i], t);
    return reconstruct(f);
}

} // namespace mdwtnn

#endif
