#pragma once

#include <array>
#include <cstdint>

#include "adaptcd/image.hpp"

namespace adaptcd::ara {

/// Exact 256-bin cumulative histogram of one channel.
struct ChannelCdf {
    std::array<std::uint64_t, 256> cumulative{};  // # pixels with intensity <= v
    std::uint64_t total = 0;

    double operator()(std::size_t v) const {
        return total == 0 ? 0.0 : static_cast<double>(cumulative[v]) / static_cast<double>(total);
    }
};

using ImageCdf = std::array<ChannelCdf, Image::kChannels>;

/// 256-entry intensity remapping per channel.
using TransferLut = std::array<std::array<std::uint8_t, 256>, Image::kChannels>;

struct AraConfig {
    double tau_max = 0.25;  // cap on the per-pixel correction magnitude, in (0, 1]

    void validate() const;
};

struct AraResult {
    Image aligned;      // blended output
    Image transferred;  // pure histogram-matched output
    double delta_max = 0.0;
    double alpha = 1.0;
};

ImageCdf compute_cdf(const Image& image);

// Per channel: T(v) = min{ u : CDF_ref(u) >= CDF_src(v) }.
TransferLut transfer_lut(const Image& source, const Image& reference);

Image apply_lut(const Image& image, const TransferLut& lut);

// Histogram-matches `source` onto `reference`, channel by channel.
Image radiometric_transfer(const Image& source, const Image& reference);

// Caps the correction so that alpha * delta_max <= tau_max, then rounds half away from
// zero. delta_max == 0 gives alpha = 1.
AraResult adaptive_mix(const Image& transferred, const Image& original, const AraConfig& config);

// Aligns image_b to image_a: transfer followed by adaptive mixing.
AraResult align(const Image& image_a, const Image& image_b, const AraConfig& config);

}  // namespace adaptcd::ara
