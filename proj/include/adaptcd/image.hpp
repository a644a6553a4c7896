#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adaptcd/error.hpp"

namespace adaptcd {

/// 8-bit RGB raster, row-major with interleaved channels.
class Image {
public:
    static constexpr std::size_t kChannels = 3;

    Image() = default;
    Image(std::size_t height, std::size_t width, std::uint8_t fill = 0);
    Image(std::size_t height, std::size_t width, std::vector<std::uint8_t> data);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t pixel_count() const noexcept { return height_ * width_; }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t at(std::size_t row, std::size_t col, std::size_t ch) const {
        return data_[(row * width_ + col) * kChannels + ch];
    }
    std::uint8_t& at(std::size_t row, std::size_t col, std::size_t ch) {
        return data_[(row * width_ + col) * kChannels + ch];
    }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    bool same_dims(const Image& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Plain 2-D grid used for dense masks and scalar maps.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), data_(height * width, fill) {}
    Grid(std::size_t height, std::size_t width, std::vector<T> data)
        : height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != height_ * width_) {
            fail(ErrorKind::InvalidArgument, "grid payload does not match dimensions");
        }
    }

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }

    T operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
    T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
    T operator[](std::size_t i) const { return data_[i]; }
    T& operator[](std::size_t i) { return data_[i]; }

    std::span<const T> values() const noexcept { return data_; }
    std::span<T> values() noexcept { return data_; }
    const T* row_ptr(std::size_t row) const { return data_.data() + row * width_; }
    T* row_ptr(std::size_t row) { return data_.data() + row * width_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> data_;
};

using DenseMask = Grid<std::uint8_t>;
using RealGrid = Grid<double>;

/// Half-open pixel rectangle: rows [row0, row1), cols [col0, col1).
struct BBox {
    std::size_t row0 = 0;
    std::size_t col0 = 0;
    std::size_t row1 = 0;
    std::size_t col1 = 0;

    std::size_t height() const noexcept { return row1 - row0; }
    std::size_t width() const noexcept { return col1 - col0; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

Image crop(const Image& image, const BBox& box);

}  // namespace adaptcd
