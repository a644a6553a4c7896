#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptcd/image.hpp"

namespace adaptcd {

// Run-length encoded binary mask. Runs alternate zeros/ones in row-major order and the
// first run always counts zeros, so a mask starting with a set pixel begins with a 0 run.
class BinaryMask {
public:
    BinaryMask() = default;

    // Validates the run invariants; throws MalformedMask on violation.
    BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint32_t> runs);

    static BinaryMask empty(std::size_t height, std::size_t width);
    static BinaryMask full(std::size_t height, std::size_t width);
    static BinaryMask from_box(std::size_t height, std::size_t width, const BBox& box);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    const std::vector<std::uint32_t>& runs() const noexcept { return runs_; }

    std::size_t count() const noexcept;
    bool is_empty() const noexcept { return count() == 0; }

    // Calls fn(start, length) for each maximal span of set pixels, in row-major order.
    void for_each_span(const std::function<void(std::size_t, std::size_t)>& fn) const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<std::uint32_t> runs_;
};

BinaryMask rle_encode(const DenseMask& grid);
DenseMask rle_decode(const BinaryMask& mask);

// Checks run invariants without throwing; returns an empty string when valid, else the
// violated invariant.
std::string validate_runs(std::size_t height, std::size_t width,
                          const std::vector<std::uint32_t>& runs);

BBox mask_bbox(const BinaryMask& mask);

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);

enum class Phase : std::uint8_t { A, B };

std::string_view to_string(Phase phase);

struct MaskInstance {
    BinaryMask mask;
    Phase source = Phase::A;

    friend bool operator==(const MaskInstance&, const MaskInstance&) = default;
};

/// Ordered instance masks sharing one frame. Ids are positions 0..N-1.
class MaskSet {
public:
    MaskSet() = default;
    MaskSet(std::size_t height, std::size_t width) : height_(height), width_(width) {}

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

    void add(BinaryMask mask, Phase source);

    const MaskInstance& operator[](std::size_t id) const { return items_[id]; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    friend bool operator==(const MaskSet&, const MaskSet&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<MaskInstance> items_;
};

}  // namespace adaptcd
