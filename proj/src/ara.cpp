#include "adaptcd/ara.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "adaptcd/simd/kernels.hpp"

namespace adaptcd::ara {

void AraConfig::validate() const {
    if (!(tau_max > 0.0 && tau_max <= 1.0)) {
        fail(ErrorKind::Config, "ara.tau_max must be in (0, 1], got " + std::to_string(tau_max));
    }
}

ImageCdf compute_cdf(const Image& image) {
    if (image.empty()) {
        fail(ErrorKind::InvalidArgument, "compute_cdf of an empty image");
    }
    std::array<std::array<std::uint64_t, 256>, Image::kChannels> counts{};
    const auto data = image.data();
    for (std::size_t i = 0; i < data.size(); i += Image::kChannels) {
        for (std::size_t c = 0; c < Image::kChannels; ++c) {
            ++counts[c][data[i + c]];
        }
    }
    ImageCdf cdf{};
    for (std::size_t c = 0; c < Image::kChannels; ++c) {
        std::uint64_t running = 0;
        for (std::size_t v = 0; v < 256; ++v) {
            running += counts[c][v];
            cdf[c].cumulative[v] = running;
        }
        cdf[c].total = running;
    }
    return cdf;
}

TransferLut transfer_lut(const Image& source, const Image& reference) {
    if (source.empty() || reference.empty()) {
        fail(ErrorKind::InvalidArgument, "radiometric transfer of an empty image");
    }
    const ImageCdf src = compute_cdf(source);
    const ImageCdf ref = compute_cdf(reference);
    TransferLut lut{};
    for (std::size_t c = 0; c < Image::kChannels; ++c) {
        // CDF_ref(u) >= CDF_src(v) compared exactly as ref_cum[u] * n_src >= src_cum[v] * n_ref.
        const auto n_src = static_cast<unsigned __int128>(src[c].total);
        const auto n_ref = static_cast<unsigned __int128>(ref[c].total);
        std::size_t u = 0;
        for (std::size_t v = 0; v < 256; ++v) {
            const auto target = static_cast<unsigned __int128>(src[c].cumulative[v]) * n_ref;
            while (u < 255 && static_cast<unsigned __int128>(ref[c].cumulative[u]) * n_src < target) {
                ++u;
            }
            lut[c][v] = static_cast<std::uint8_t>(u);
        }
    }
    return lut;
}

Image apply_lut(const Image& image, const TransferLut& lut) {
    Image out(image.height(), image.width());
    const auto in = image.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < in.size(); i += Image::kChannels) {
        for (std::size_t c = 0; c < Image::kChannels; ++c) {
            dst[i + c] = lut[c][in[i + c]];
        }
    }
    return out;
}

Image radiometric_transfer(const Image& source, const Image& reference) {
    if (!source.same_dims(reference)) {
        fail(ErrorKind::DimensionMismatch, "radiometric_transfer requires equal image dims");
    }
    return apply_lut(source, transfer_lut(source, reference));
}

AraResult adaptive_mix(const Image& transferred, const Image& original, const AraConfig& config) {
    config.validate();
    if (!transferred.same_dims(original)) {
        fail(ErrorKind::DimensionMismatch, "adaptive_mix requires equal image dims");
    }
    const auto t = transferred.data();
    const auto o = original.data();
    int max_abs = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(static_cast<int>(t[i]) - static_cast<int>(o[i])));
    }

    AraResult result;
    result.transferred = transferred;
    result.delta_max = static_cast<double>(max_abs) / 255.0;
    result.alpha = result.delta_max == 0.0 ? 1.0 : std::min(1.0, config.tau_max / result.delta_max);

    if (result.alpha == 1.0) {
        result.aligned = transferred;
        return result;
    }
    Image out(original.height(), original.width());
    simd::active_kernels().blend_u8(t.data(), o.data(), t.size(), result.alpha, out.data().data());
    result.aligned = std::move(out);
    return result;
}

AraResult align(const Image& image_a, const Image& image_b, const AraConfig& config) {
    return adaptive_mix(radiometric_transfer(image_b, image_a), image_b, config);
}

}  // namespace adaptcd::ara
