#ifndef MDWTNN_CUBE_HPP
#define MDWTNN_CUBE_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "mdwtnn/errors.hpp"

namespace mdwtnn {

// Element order is fixed for the whole project (storage, file format, oracles):
// frontal-slice-major by the third index, column-major within a slice, i.e.
// value(i,j,k) lives at  i + n1*j + n1*n2*k  with 0-based indices.

struct Dims {
    std::size_t n1 = 0, n2 = 0, n3 = 0;

    std::size_t count() const { return n1 * n2 * n3; }
    bool operator==(const Dims&) const = default;
};

// Checked product, used by I/O before allocating anything.
inline std::size_t checked_count(std::size_t n1, std::size_t n2, std::size_t n3) {
    if (n1 == 0 || n2 == 0 || n3 == 0)
        throw UsageError("cube dims must be positive");
    const std::size_t cap = std::numeric_limits<std::size_t>::max() / sizeof(double) / 2;
    if (n1 > cap / n2 || n1 * n2 > cap / n3)
        throw IoError("cube dims overflow");
    return n1 * n2 * n3;
}

enum class Mode : int { one = 1, two = 2, three = 3 };

inline Mode mode_from_int(int p) {
    if (p < 1 || p > 3) throw UsageError("mode index must be 1, 2 or 3");
    return static_cast<Mode>(p);
}

template <typename T>
struct TensorT {
    Dims dims;
    std::vector<T> values;

    TensorT() = default;
    TensorT(std::size_t n1, std::size_t n2, std::size_t n3)
        : dims{n1, n2, n3}, values(checked_count(n1, n2, n3), T{}) {}
    explicit TensorT(Dims d) : TensorT(d.n1, d.n2, d.n3) {}

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return i + dims.n1 * (j + dims.n2 * k);
    }
    T& operator()(std::size_t i, std::size_t j, std::size_t k) { return values[index(i, j, k)]; }
    const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return values[index(i, j, k)];
    }

    // Pointer to the contiguous n1 x n2 frontal slice at third index k.
    T* slice(std::size_t k) { return values.data() + dims.n1 * dims.n2 * k; }
    const T* slice(std::size_t k) const { return values.data() + dims.n1 * dims.n2 * k; }

    std::size_t size() const { return values.size(); }
};

using Cube = TensorT<double>;
using SpectralCube = TensorT<std::complex<double>>;

inline bool all_finite(const Cube& x) {
    for (double v : x.values)
        if (!std::isfinite(v)) return false;
    return true;
}

// Mode-p permutation: the m-th frontal slice of the result is the m-th
// mode-p slice of the input, so x(i,j,k) = r(j,k,i) for p=1, r(k,i,j) for
// p=2 and r(i,j,k) for p=3.
template <typename T>
TensorT<T> permute_mode(const TensorT<T>& x, Mode p) {
    const auto [n1, n2, n3] = x.dims;
    switch (p) {
    case Mode::one: {
        TensorT<T> r(n2, n3, n1);
        for (std::size_t k = 0; k < n3; ++k)
            for (std::size_t j = 0; j < n2; ++j)
                for (std::size_t i = 0; i < n1; ++i)
                    r(j, k, i) = x(i, j, k);
        return r;
    }
    case Mode::two: {
        TensorT<T> r(n3, n1, n2);
        for (std::size_t k = 0; k < n3; ++k)
            for (std::size_t j = 0; j < n2; ++j)
                for (std::size_t i = 0; i < n1; ++i)
                    r(k, i, j) = x(i, j, k);
        return r;
    }
    case Mode::three: return x;
    }
    throw UsageError("bad mode");
}

template <typename T>
TensorT<T> ipermute_mode(const TensorT<T>& xp, Mode p) {
    const auto [m1, m2, m3] = xp.dims;
    switch (p) {
    case Mode::one: {
        // xp dims are (n2, n3, n1)
        TensorT<T> r(m3, m1, m2);
        for (std::size_t k = 0; k < m3; ++k)
            for (std::size_t j = 0; j < m2; ++j)
                for (std::size_t i = 0; i < m1; ++i)
                    r(k, i, j) = xp(i, j, k);
        return r;
    }
    case Mode::two: {
        // xp dims are (n3, n1, n2)
        TensorT<T> r(m2, m3, m1);
        for (std::size_t k = 0; k < m3; ++k)
            for (std::size_t j = 0; j < m2; ++j)
                for (std::size_t i = 0; i < m1; ++i)
                    r(j, k, i) = xp(i, j, k);
        return r;
    }
    case Mode::three: return xp;
    }
    throw UsageError("bad mode");
}

// Length of the permuted third dimension, i.e. how many frequency slices
// mode p contributes: n1 for p=1, n2 for p=2, n3 for p=3.
inline std::size_t mode_depth(const Dims& d, Mode p) {
    switch (p) {
    case Mode::one: return d.n1;
    case Mode::two: return d.n2;
    case Mode::three: return d.n3;
    }
    throw UsageError("bad mode");
}

inline double frobenius_norm(const Cube& x) {
    double s = 0;
    for (double v : x.values) s += v * v;
    return std::sqrt(s);
}

inline double frobenius_norm(const SpectralCube& x) {
    double s = 0;
    for (const auto& v : x.values) s += std::norm(v);
    return std::sqrt(s);
}

inline double inner_product(const Cube& x, const Cube& y) {
    if (!(x.dims == y.dims)) throw UsageError("inner_product: dimension mismatch");
    double s = 0;
    for (std::size_t t = 0; t < x.size(); ++t) s += x.values[t] * y.values[t];
    return s;
}

// Elementwise helpers used throughout the solver. All require equal dims.
inline void check_same_dims(const Cube& a, const Cube& b, const char* what) {
    if (!(a.dims == b.dims)) throw UsageError(std::string(what) + ": dimension mismatch");
}

inline Cube operator+(const Cube& a, const Cube& b) {
    check_same_dims(a, b, "cube add");
    Cube r(a.dims);
    for (std::size_t t = 0; t < r.size(); ++t) r.values[t] = a.values[t] + b.values[t];
    return r;
}

inline Cube operator-(const Cube& a, const Cube& b) {
    check_same_dims(a, b, "cube sub");
    Cube r(a.dims);
    for (std::size_t t = 0; t < r.size(); ++t) r.values[t] = a.values[t] - b.values[t];
    return r;
}

inline Cube operator*(double c, const Cube& a) {
    Cube r(a.dims);
    for (std::size_t t = 0; t < r.size(); ++t) r.values[t] = c * a.values[t];
    return r;
}

inline Cube& operator+=(Cube& a, const Cube& b) {
    check_same_dims(a, b, "cube add");
    for (std::size_t t = 0; t < a.size(); ++t) a.values[t] += b.values[t];
    return a;
}

inline void axpy(double c, const Cube& x, Cube& y) {
    check_same_dims(x, y, "axpy");
    for (std::size_t t = 0; t < y.size(); ++t) y.values[t] += c * x.values[t];
}

} // namespace mdwtnn

#endif
