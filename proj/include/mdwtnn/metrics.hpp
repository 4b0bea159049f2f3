#ifndef MDWTNN_METRICS_HPP
#define MDWTNN_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "mdwtnn/cube.hpp"

namespace mdwtnn {

inline constexpr double psnr_cap_db = 100.0;

// 10*log10(peak^2 / MSE), capped at 100 dB (identical bands report the cap).
inline double psnr(std::span<const double> ref, std::span<const double> test, double peak = 1.0) {
    if (ref.size() != test.size() || ref.empty()) throw UsageError("psnr: dimension mismatch");
    double mse = 0;
    for (std::size_t t = 0; t < ref.size(); ++t) {
        const double d = ref[t] - test[t];
        mse += d * d;
    }
    mse /= static_cast<double>(ref.size());
    if (mse == 0) return psnr_cap_db;
    return std::min(psnr_cap_db, 10.0 * std::log10(peak * peak / mse));
}

// Mean local SSIM with the standard 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range 1. Windows slide over positions where
// they fit entirely; bands smaller than the window fall back to
// border-truncated renormalized windows and set *truncated.
inline double ssim(const double* ref, const double* test, std::size_t rows, std::size_t cols,
                   bool* truncated = nullptr) {
    constexpr int win = 11;
    constexpr double sigma = 1.5;
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;

    double kernel[win][win];
    double ksum = 0;
    for (int a = 0; a < win; ++a)
        for (int b = 0; b < win; ++b) {
            const double dy = a - win / 2, dx = b - win / 2;
            kernel[a][b] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
            ksum += kernel[a][b];
        }
    for (auto& row : kernel)
        for (auto& v : row) v /= ksum;

    const bool fits = rows >= win && cols >= win;
    if (truncated) *truncated = !fits;
    auto at = [&](const double* img, std::size_t i, std::size_t j) { return img[i + rows * j]; };

    double total = 0;
    std::size_t count = 0;
    const std::size_t i_end = fits ? rows - win + 1 : rows;
    const std::size_t j_end = fits ? cols - win + 1 : cols;
    for (std::size_t j0 = 0; j0 < j_end; ++j0) {
        for (std::size_t i0 = 0; i0 < i_end; ++i0) {
            double w_sum = 0, mx = 0, my = 0;
            double xx = 0, yy = 0, xy = 0;
            for (int a = 0; a < win; ++a) {
                for (int b = 0; b < win; ++b) {
                    std::ptrdiff_t i = fits ? static_cast<std::ptrdiff_t>(i0) + a
                                            : static_cast<std::ptrdiff_t>(i0) + a - win / 2;
                    std::ptrdiff_t j = fits ? static_cast<std::ptrdiff_t>(j0) + b
                                            : static_cast<std::ptrdiff_t>(j0) + b - win / 2;
                    if (!fits && (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(rows) ||
                                  j >= static_cast<std::ptrdiff_t>(cols)))
                        continue;
                    const double w = kernel[a][b];
                    const double x = at(ref, i, j), y = at(test, i, j);
                    w_sum += w;
                    mx += w * x;
                    my += w * y;
                    xx += w * x * x;
                    yy += w * y * y;
                    xy += w * x * y;
                }
            }
            mx /= w_sum;
            my /= w_sum;
            const double vx = xx / w_sum - mx * mx;
            const double vy = yy / w_sum - my * my;
            const double cov = xy / w_sum - mx * my;
            total += ((2 * mx * my + c1) * (2 * cov + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

// Per-pixel spectral angle in degrees. Pixels where either spectrum has norm
// below 1e-12 carry NaN and are excluded from the mean.
struct SamField {
    std::size_t rows = 0, cols = 0;
    std::vector<double> degrees; // NaN marks excluded pixels
    double mean = 0.0;
    std::size_t valid = 0;
};

inline SamField sam(const Cube& ref, const Cube& test) {
    check_same_dims(ref, test, "sam");
    const auto [n1, n2, n3] = ref.dims;
    SamField field;
    field.rows = n1;
    field.cols = n2;
    field.degrees.assign(n1 * n2, std::numeric_limits<double>::quiet_NaN());
    double sum = 0;
    std::vector<double> u(n3), v(n3);
    for (std::size_t j = 0; j < n2; ++j) {
        for (std::size_t i = 0; i < n1; ++i) {
            double na = 0, nb = 0;
            for (std::size_t k = 0; k < n3; ++k) {
                na += ref(i, j, k) * ref(i, j, k);
                nb += test(i, j, k) * test(i, j, k);
            }
            na = std::sqrt(na);
            nb = std::sqrt(nb);
            if (na < 1e-12 || nb < 1e-12) continue;
            // angle on the normalized spectra via 2*atan2(|u-v|, |u+v|),
            // which stays accurate down to exactly zero
            double d_minus = 0, d_plus = 0;
            for (std::size_t k = 0; k < n3; ++k) {
                const double a = ref(i, j, k) / na, b = test(i, j, k) / nb;
                d_minus += (a - b) * (a - b);
                d_plus += (a + b) * (a + b);
            }
            const double deg = 2.0 * std::atan2(std::sqrt(d_minus), std::sqrt(d_plus)) * 180.0 /
                               std::numbers::pi;
            field.degrees[i + n1 * j] = deg;
            sum += deg;
            ++field.valid;
        }
    }
    if (field.valid == 0) throw NumericalError("sam: every pixel has a degenerate spectrum");
    field.mean = sum / static_cast<double>(field.valid);
    return field;
}

struct QualityReport {
    std::vector<double> psnr_per_band;
    std::vector<double> ssim_per_band;
    SamField sam_field;
    double mpsnr = 0.0;
    double mssim = 0.0;
    double msam = 0.0;
    double wall_time_seconds = 0.0; // filled by the caller when timing is on
    bool ssim_truncated_windows = false;
};

inline QualityReport evaluate(const Cube& ref, const Cube& test, double peak = 1.0) {
    check_same_dims(ref, test, "evaluate");
    const auto [n1, n2, n3] = ref.dims;
    QualityReport report;
    report.psnr_per_band.resize(n3);
    report.ssim_per_band.resize(n3);
    const std::size_t band_len = n1 * n2;
    for (std::size_t k = 0; k < n3; ++k) {
        std::span<const double> rb(ref.slice(k), band_len);
        std::span<const double> tb(test.slice(k), band_len);
        report.psnr_per_band[k] = psnr(rb, tb, peak);
        bool trunc = false;
        report.ssim_per_band[k] = ssim(ref.slice(k), test.slice(k), n1, n2, &trunc);
        report.ssim_truncated_windows |= trunc;
    }
    report.sam_field = sam(ref, test);
    double sp = 0, ss = 0;
    for (std::size_t k = 0; k < n3; ++k) {
        sp += report.psnr_per_band[k];
        ss += report.ssim_per_band[k];
    }
    report.mpsnr = sp / static_cast<double>(n3);
    report.mssim = ss / static_cast<double>(n3);
    report.msam = report.sam_field.mean;
    return report;
}

} // namespace mdwtnn

#endif
