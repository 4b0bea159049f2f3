#ifndef MDWTNN_FFT_HPP
#define MDWTNN_FFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "mdwtnn/cube.hpp"
#include "mdwtnn/errors.hpp"

namespace mdwtnn {

// DFT convention for the whole project: unnormalized forward,
// X_k = sum_t x_t exp(-2*pi*i*k*t/n), inverse scaled by 1/n. This is the
// convention under which the tensor nuclear norm carries its 1/n3 factor.
//
// Arbitrary lengths are supported: power-of-two sizes run an iterative
// radix-2 transform, everything else goes through Bluestein's chirp-z
// reduction to a padded power-of-two convolution.
class Dft {
public:
    using cplx = std::complex<double>;

    explicit Dft(std::size_t n) : n_(n) {
        if (n == 0) throw UsageError("Dft: length must be positive");
        if (is_pow2(n)) {
            init_radix2(n);
        } else {
            init_bluestein();
        }
    }

    std::size_t length() const { return n_; }

    // In-place forward transform of buf[0..n).
    void forward(cplx* buf) const {
        if (is_pow2(n_)) {
            radix2(buf, n_);
        } else {
            bluestein(buf);
        }
    }

    // In-place inverse transform (scales by 1/n).
    void inverse(cplx* buf) const {
        for (std::size_t t = 0; t < n_; ++t) buf[t] = std::conj(buf[t]);
        forward(buf);
        const double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t t = 0; t < n_; ++t) buf[t] = std::conj(buf[t]) * inv;
    }

private:
    static bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

    static std::size_t next_pow2(std::size_t n) {
        std::size_t m = 1;
        while (m < n) m <<= 1;
        return m;
    }

    void init_radix2(std::size_t m) {
        m_ = m;
        twiddle_.resize(m / 2);
        for (std::size_t j = 0; j < m / 2; ++j) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
            twiddle_[j] = cplx(std::cos(ang), std::sin(ang));
        }
        rev_.resize(m);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < m) ++bits;
        for (std::size_t t = 0; t < m; ++t) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (t & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            rev_[t] = r;
        }
    }

    void radix2(cplx* buf, std::size_t m) const {
        for (std::size_t t = 0; t < m; ++t)
            if (rev_[t] > t) std::swap(buf[t], buf[rev_[t]]);
        for (std::size_t len = 2; len <= m; len <<= 1) {
            const std::size_t stride = m / len;
            for (std::size_t start = 0; start < m; start += len) {
                for (std::size_t j = 0; j < len / 2; ++j) {
                    const cplx w = twiddle_[j * stride];
                    cplx& a = buf[start + j];
                    cplx& b = buf[start + j + len / 2];
                    const cplx t = w * b;
                    b = a - t;
                    a += t;
                }
            }
        }
    }

    void init_bluestein() {
        m_ = next_pow2(2 * n_ - 1);
        init_radix2(m_);
        // chirp_[t] = exp(-i*pi*t^2/n); t^2 reduced mod 2n keeps the phase exact.
        chirp_.resize(n_);
        for (std::size_t t = 0; t < n_; ++t) {
            const std::size_t q = (t * t) % (2 * n_);
            const double ang = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n_);
            chirp_[t] = cplx(std::cos(ang), std::sin(ang));
        }
        std::vector<cplx> b(m_, cplx{});
        b[0] = std::conj(chirp_[0]);
        for (std::size_t t = 1; t < n_; ++t) b[t] = b[m_ - t] = std::conj(chirp_[t]);
        radix2(b.data(), m_);
        chirp_spectrum_ = std::move(b);
    }

    void bluestein(cplx* buf) const {
        std::vector<cplx> a(m_, cplx{});
        for (std::size_t t = 0; t < n_; ++t) a[t] = buf[t] * chirp_[t];
        radix2(a.data(), m_);
        for (std::size_t t = 0; t < m_; ++t) a[t] *= chirp_spectrum_[t];
        // inverse length-m radix-2 via conjugation
        for (std::size_t t = 0; t < m_; ++t) a[t] = std::conj(a[t]);
        radix2(a.data(), m_);
        const double inv = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) buf[k] = std::conj(a[k]) * inv * chirp_[k];
    }

    std::size_t n_ = 0;
    std::size_t m_ = 0;                 // radix-2 working length
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> rev_;
    std::vector<cplx> chirp_;           // Bluestein only
    std::vector<cplx> chirp_spectrum_;  // Bluestein only
};

inline SpectralCube fft_mode3(const Cube& x) {
    const auto [n1, n2, n3] = x.dims;
    SpectralCube out(n1, n2, n3);
    const Dft plan(n3);
    std::vector<std::complex<double>> tube(n3);
    const std::size_t stride = n1 * n2;
    for (std::size_t j = 0; j < n2; ++j) {
        for (std::size_t i = 0; i < n1; ++i) {
            const std::size_t base = i + n1 * j;
            for (std::size_t k = 0; k < n3; ++k) tube[k] = x.values[base + stride * k];
            plan.forward(tube.data());
            for (std::size_t k = 0; k < n3; ++k) out.values[base + stride * k] = tube[k];
        }
    }
    return out;
}

// Inverse mode-3 transform of a conjugate-symmetric spectrum. The imaginary
// residue of the inverse is discarded when below 1e-10 (scaled by the output
// magnitude); anything larger means the input was not the spectrum of a real
// cube and raises SymmetryError.
inline Cube ifft_mode3(const SpectralCube& xb) {
    const auto [n1, n2, n3] = xb.dims;
    Cube out(n1, n2, n3);
    const Dft plan(n3);
    std::vector<std::complex<double>> tube(n3);
    const std::size_t stride = n1 * n2;
    double max_imag = 0.0, max_abs = 0.0;
    for (std::size_t j = 0; j < n2; ++j) {
        for (std::size_t i = 0; i < n1; ++i) {
            const std::size_t base = i + n1 * j;
            for (std::size_t k = 0; k < n3; ++k) tube[k] = xb.values[base + stride * k];
            plan.inverse(tube.data());
            for (std::size_t k = 0; k < n3; ++k) {
                max_imag = std::max(max_imag, std::abs(tube[k].imag()));
                max_abs = std::max(max_abs, std::abs(tube[k]));
                out.values[base + stride * k] = tube[k].real();
            }
        }
    }
    if (max_imag > 1e-10 * std::max(1.0, max_abs))
        throw SymmetryError("ifft_mode3: spectrum is not conjugate-symmetric (imag residue " +
                            std::to_string(max_imag) + ")");
    return out;
}

} // namespace mdwtnn

#endif
