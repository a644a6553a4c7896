// Compiled with -mavx2 (and without -mfma) only on x86-64 builds.

#include <immintrin.h>

#include <cmath>

#include "adaptcd/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace adaptcd::simd {
namespace {

constexpr std::size_t kLanes = 4;

void l2_diff_avx2(const float* a, const float* b, std::size_t channels, std::size_t plane,
                  double* out) {
    std::size_t p = 0;
    for (; p + kLanes <= plane; p += kLanes) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t c = 0; c < channels; ++c) {
            const __m256d va = _mm256_cvtps_pd(_mm_loadu_ps(a + c * plane + p));
            const __m256d vb = _mm256_cvtps_pd(_mm_loadu_ps(b + c * plane + p));
            const __m256d d = _mm256_sub_pd(va, vb);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
        }
        _mm256_storeu_pd(out + p, _mm256_sqrt_pd(acc));
    }
    for (; p < plane; ++p) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const double d = static_cast<double>(a[c * plane + p]) -
                             static_cast<double>(b[c * plane + p]);
            acc = acc + d * d;
        }
        out[p] = std::sqrt(acc);
    }
}

inline __m256d load_u8x4(const std::uint8_t* src) {
    std::int32_t word;
    __builtin_memcpy(&word, src, sizeof(word));
    const __m128i bytes = _mm_cvtsi32_si128(word);
    return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(bytes));
}

void blend_u8_avx2(const std::uint8_t* transferred, const std::uint8_t* original,
                   std::size_t n, double alpha, std::uint8_t* out) {
    const double beta = 1.0 - alpha;
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vb = _mm256_set1_pd(beta);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d lo = _mm256_setzero_pd();
    const __m256d hi = _mm256_set1_pd(255.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d t = load_u8x4(transferred + i);
        const __m256d o = load_u8x4(original + i);
        const __m256d v = _mm256_add_pd(_mm256_mul_pd(va, t), _mm256_mul_pd(vb, o));
        __m256d r = _mm256_floor_pd(v);
        const __m256d up = _mm256_cmp_pd(_mm256_sub_pd(v, r), half, _CMP_GE_OQ);
        r = _mm256_add_pd(r, _mm256_and_pd(up, one));
        r = _mm256_min_pd(_mm256_max_pd(r, lo), hi);
        const __m128i ints = _mm256_cvttpd_epi32(r);
        const __m128i packed16 = _mm_packus_epi32(ints, ints);
        const __m128i packed8 = _mm_packus_epi16(packed16, packed16);
        const std::int32_t word = _mm_cvtsi128_si32(packed8);
        __builtin_memcpy(out + i, &word, sizeof(word));
    }
    for (; i < n; ++i) {
        const double v = alpha * static_cast<double>(transferred[i]) +
                         beta * static_cast<double>(original[i]);
        out[i] = detail::round_clamp_u8(v);
    }
}

void sobel_row_avx2(const double* top, const double* mid, const double* bot,
                    std::size_t width, double* out) {
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t c = 0;
    for (; c + kLanes <= width; c += kLanes) {
        const __m256d t0 = _mm256_loadu_pd(top + c);
        const __m256d t1 = _mm256_loadu_pd(top + c + 1);
        const __m256d t2 = _mm256_loadu_pd(top + c + 2);
        const __m256d m0 = _mm256_loadu_pd(mid + c);
        const __m256d m2 = _mm256_loadu_pd(mid + c + 2);
        const __m256d b0 = _mm256_loadu_pd(bot + c);
        const __m256d b1 = _mm256_loadu_pd(bot + c + 1);
        const __m256d b2 = _mm256_loadu_pd(bot + c + 2);
        const __m256d right = _mm256_add_pd(_mm256_add_pd(t2, _mm256_mul_pd(two, m2)), b2);
        const __m256d left = _mm256_add_pd(_mm256_add_pd(t0, _mm256_mul_pd(two, m0)), b0);
        const __m256d gx = _mm256_sub_pd(right, left);
        const __m256d lower = _mm256_add_pd(_mm256_add_pd(b0, _mm256_mul_pd(two, b1)), b2);
        const __m256d upper = _mm256_add_pd(_mm256_add_pd(t0, _mm256_mul_pd(two, t1)), t2);
        const __m256d gy = _mm256_sub_pd(lower, upper);
        const __m256d mag2 = _mm256_add_pd(_mm256_mul_pd(gx, gx), _mm256_mul_pd(gy, gy));
        _mm256_storeu_pd(out + c, _mm256_sqrt_pd(mag2));
    }
    for (; c < width; ++c) {
        const double gx = (top[c + 2] + 2.0 * mid[c + 2] + bot[c + 2]) -
                          (top[c] + 2.0 * mid[c] + bot[c]);
        const double gy = (bot[c] + 2.0 * bot[c + 1] + bot[c + 2]) -
                          (top[c] + 2.0 * top[c + 1] + top[c + 2]);
        out[c] = std::sqrt(gx * gx + gy * gy);
    }
}

void window_sum_avx2(const double* in, std::size_t width, std::size_t taps, double* out) {
    std::size_t c = 0;
    for (; c + kLanes <= width; c += kLanes) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t d = 0; d < taps; ++d) {
            acc = _mm256_add_pd(acc, _mm256_loadu_pd(in + c + d));
        }
        _mm256_storeu_pd(out + c, acc);
    }
    for (; c < width; ++c) {
        double acc = 0.0;
        for (std::size_t d = 0; d < taps; ++d) {
            acc = acc + in[c + d];
        }
        out[c] = acc;
    }
}

void row_sum_avx2(const double* const* rows, std::size_t nrows, std::size_t width,
                  double* out) {
    std::size_t c = 0;
    for (; c + kLanes <= width; c += kLanes) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t r = 0; r < nrows; ++r) {
            acc = _mm256_add_pd(acc, _mm256_loadu_pd(rows[r] + c));
        }
        _mm256_storeu_pd(out + c, acc);
    }
    for (; c < width; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < nrows; ++r) {
            acc = acc + rows[r][c];
        }
        out[c] = acc;
    }
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2", l2_diff_avx2, blend_u8_avx2, sobel_row_avx2, window_sum_avx2, row_sum_avx2,
    };
    return table;
}

}  // namespace detail
}  // namespace adaptcd::simd
