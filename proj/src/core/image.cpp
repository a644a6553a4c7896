#include "adaptcd/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptcd/features.hpp"

namespace adaptcd {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedMask: return "malformed-mask";
        case ErrorKind::EmptyRegion: return "empty-region";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::TooSmall: return "too-small";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::CorruptFeature: return "corrupt-feature";
        case ErrorKind::MissingPrototype: return "missing-prototype";
        case ErrorKind::MissingKey: return "missing-key";
        case ErrorKind::Provider: return "provider";
        case ErrorKind::Io: return "io";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

Image::Image(std::size_t height, std::size_t width, std::uint8_t fill)
    : height_(height), width_(width), data_(height * width * kChannels, fill) {}

Image::Image(std::size_t height, std::size_t width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != height_ * width_ * kChannels) {
        fail(ErrorKind::InvalidArgument,
             "image payload has " + std::to_string(data_.size()) + " bytes, expected " +
                 std::to_string(height_ * width_ * kChannels));
    }
}

Image crop(const Image& image, const BBox& box) {
    if (box.row0 >= box.row1 || box.col0 >= box.col1 || box.row1 > image.height() ||
        box.col1 > image.width()) {
        fail(ErrorKind::InvalidArgument, "crop box outside image");
    }
    Image out(box.height(), box.width());
    for (std::size_t r = 0; r < box.height(); ++r) {
        const auto src = image.data().subspan(
            ((box.row0 + r) * image.width() + box.col0) * Image::kChannels,
            box.width() * Image::kChannels);
        std::copy(src.begin(), src.end(),
                  out.data().begin() + static_cast<std::ptrdiff_t>(r * box.width() * Image::kChannels));
    }
    return out;
}

DenseFeatureMap::DenseFeatureMap(std::size_t channels, std::size_t height, std::size_t width)
    : channels_(channels), height_(height), width_(width), data_(channels * height * width) {}

DenseFeatureMap::DenseFeatureMap(std::size_t channels, std::size_t height, std::size_t width,
                                 std::vector<float> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != channels_ * height_ * width_) {
        fail(ErrorKind::CorruptFeature, "feature payload does not match C*H*W");
    }
}

void DenseFeatureMap::require_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            fail(ErrorKind::CorruptFeature,
                 "non-finite feature value at flat index " + std::to_string(i));
        }
    }
}

}  // namespace adaptcd
