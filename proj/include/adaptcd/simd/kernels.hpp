#pragma once

// Data-parallel inner loops with a scalar reference and optional vector variants.
//
// Every vector variant processes independent pixels in separate lanes and performs the
// same sequence of IEEE operations per lane as the scalar code (no FMA contraction), so
// all variants are bit-identical to the reference. tests/test_simd.cpp enforces this.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace adaptcd::simd {

struct KernelTable {
    std::string_view name;

    // out[p] = sqrt(sum_c (a[c*plane + p] - b[c*plane + p])^2), channels summed in order.
    void (*l2_diff)(const float* a, const float* b, std::size_t channels, std::size_t plane,
                    double* out);

    // out[i] = clamp(round_half_away(alpha * transferred[i] + (1 - alpha) * original[i])).
    void (*blend_u8)(const std::uint8_t* transferred, const std::uint8_t* original,
                     std::size_t n, double alpha, std::uint8_t* out);

    // One output row of Sobel magnitude. `top`, `mid`, `bot` point at replicate-padded
    // rows of length width + 2.
    void (*sobel_row)(const double* top, const double* mid, const double* bot,
                      std::size_t width, double* out);

    // out[c] = sum_{d=0}^{taps-1} in[c + d], summed in increasing d.
    void (*window_sum)(const double* in, std::size_t width, std::size_t taps, double* out);

    // out[c] = sum_{r=0}^{nrows-1} rows[r][c], summed in increasing r.
    void (*row_sum)(const double* const* rows, std::size_t nrows, std::size_t width,
                    double* out);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the instruction set.
const KernelTable* avx2_kernels();

// Best available table. ADAPTCD_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

}  // namespace adaptcd::simd
