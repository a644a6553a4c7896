#include "adaptcd/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "kernels_internal.hpp"

namespace adaptcd::simd {
namespace {

void l2_diff_scalar(const float* a, const float* b, std::size_t channels, std::size_t plane,
                    double* out) {
    for (std::size_t p = 0; p < plane; ++p) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const double d = static_cast<double>(a[c * plane + p]) -
                             static_cast<double>(b[c * plane + p]);
            acc = acc + d * d;
        }
        out[p] = std::sqrt(acc);
    }
}

void blend_u8_scalar(const std::uint8_t* transferred, const std::uint8_t* original,
                     std::size_t n, double alpha, std::uint8_t* out) {
    const double beta = 1.0 - alpha;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = alpha * static_cast<double>(transferred[i]) +
                         beta * static_cast<double>(original[i]);
        out[i] = detail::round_clamp_u8(v);
    }
}

void sobel_row_scalar(const double* top, const double* mid, const double* bot,
                      std::size_t width, double* out) {
    for (std::size_t c = 0; c < width; ++c) {
        const double gx = (top[c + 2] + 2.0 * mid[c + 2] + bot[c + 2]) -
                          (top[c] + 2.0 * mid[c] + bot[c]);
        const double gy = (bot[c] + 2.0 * bot[c + 1] + bot[c + 2]) -
                          (top[c] + 2.0 * top[c + 1] + top[c + 2]);
        out[c] = std::sqrt(gx * gx + gy * gy);
    }
}

void window_sum_scalar(const double* in, std::size_t width, std::size_t taps, double* out) {
    for (std::size_t c = 0; c < width; ++c) {
        double acc = 0.0;
        for (std::size_t d = 0; d < taps; ++d) {
            acc = acc + in[c + d];
        }
        out[c] = acc;
    }
}

void row_sum_scalar(const double* const* rows, std::size_t nrows, std::size_t width,
                    double* out) {
    for (std::size_t c = 0; c < width; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < nrows; ++r) {
            acc = acc + rows[r][c];
        }
        out[c] = acc;
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        "scalar", l2_diff_scalar, blend_u8_scalar, sobel_row_scalar, window_sum_scalar,
        row_sum_scalar,
    };
    return table;
}

}  // namespace adaptcd::simd
