#pragma once

#include <cmath>
#include <cstdint>

namespace adaptcd::simd::detail {

// Round half away from zero for v >= 0, then clamp to [0, 255]. Written as
// floor + fractional compare so the vector variants can reproduce it exactly
// (floor(v + 0.5) misrounds 0.49999999999999994).
inline std::uint8_t round_clamp_u8(double v) {
    double t = std::floor(v);
    if (v - t >= 0.5) {
        t += 1.0;
    }
    if (t < 0.0) t = 0.0;
    if (t > 255.0) t = 255.0;
    return static_cast<std::uint8_t>(t);
}

}  // namespace adaptcd::simd::detail
