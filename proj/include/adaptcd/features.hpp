#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adaptcd/error.hpp"

namespace adaptcd {

/// C x H x W float tensor stored channel-major: index = (c * H + row) * W + col.
class DenseFeatureMap {
public:
    DenseFeatureMap() = default;
    DenseFeatureMap(std::size_t channels, std::size_t height, std::size_t width);
    DenseFeatureMap(std::size_t channels, std::size_t height, std::size_t width,
                    std::vector<float> data);

    std::size_t channels() const noexcept { return channels_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t plane_size() const noexcept { return height_ * width_; }

    float at(std::size_t c, std::size_t row, std::size_t col) const {
        return data_[(c * height_ + row) * width_ + col];
    }
    float& at(std::size_t c, std::size_t row, std::size_t col) {
        return data_[(c * height_ + row) * width_ + col];
    }

    std::span<const float> plane(std::size_t c) const {
        return std::span<const float>(data_).subspan(c * plane_size(), plane_size());
    }
    std::span<float> plane(std::size_t c) {
        return std::span<float>(data_).subspan(c * plane_size(), plane_size());
    }

    std::span<const float> data() const noexcept { return data_; }
    std::span<float> data() noexcept { return data_; }

    bool same_dims(const DenseFeatureMap& o) const noexcept {
        return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
    }

    // Throws CorruptFeature if any value is NaN or infinite.
    void require_finite() const;

    friend bool operator==(const DenseFeatureMap&, const DenseFeatureMap&) = default;

private:
    std::size_t channels_ = 0;
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<float> data_;
};

}  // namespace adaptcd
