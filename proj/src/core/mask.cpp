#include "adaptcd/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace adaptcd {

std::string validate_runs(std::size_t height, std::size_t width,
                          const std::vector<std::uint32_t>& runs) {
    if (height == 0 || width == 0) {
        return "mask dimensions must be positive";
    }
    if (runs.empty()) {
        return "run list is empty";
    }
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i] == 0 && i != 0) {
            return "zero-length run at position " + std::to_string(i);
        }
        total += runs[i];
    }
    if (total != static_cast<std::uint64_t>(height) * width) {
        return "run-sum " + std::to_string(total) + " != height*width " +
               std::to_string(height * width);
    }
    return {};
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint32_t> runs)
    : height_(height), width_(width), runs_(std::move(runs)) {
    if (auto problem = validate_runs(height_, width_, runs_); !problem.empty()) {
        fail(ErrorKind::MalformedMask, problem);
    }
}

BinaryMask BinaryMask::empty(std::size_t height, std::size_t width) {
    return BinaryMask(height, width, {static_cast<std::uint32_t>(height * width)});
}

BinaryMask BinaryMask::full(std::size_t height, std::size_t width) {
    return BinaryMask(height, width, {0, static_cast<std::uint32_t>(height * width)});
}

BinaryMask BinaryMask::from_box(std::size_t height, std::size_t width, const BBox& box) {
    DenseMask grid(height, width);
    for (std::size_t r = box.row0; r < box.row1; ++r) {
        for (std::size_t c = box.col0; c < box.col1; ++c) {
            grid(r, c) = 1;
        }
    }
    return rle_encode(grid);
}

std::size_t BinaryMask::count() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 1; i < runs_.size(); i += 2) {
        n += runs_[i];
    }
    return n;
}

void BinaryMask::for_each_span(
    const std::function<void(std::size_t, std::size_t)>& fn) const {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < runs_.size(); ++i) {
        if (i % 2 == 1 && runs_[i] > 0) {
            fn(pos, runs_[i]);
        }
        pos += runs_[i];
    }
}

BinaryMask rle_encode(const DenseMask& grid) {
    if (grid.height() == 0 || grid.width() == 0) {
        fail(ErrorKind::InvalidArgument, "cannot encode an empty grid");
    }
    std::vector<std::uint32_t> runs;
    std::uint8_t current = 0;
    std::uint32_t length = 0;
    for (auto v : grid.values()) {
        const std::uint8_t bit = v != 0 ? 1 : 0;
        if (bit != current) {
            runs.push_back(length);
            length = 0;
            current = bit;
        }
        ++length;
    }
    runs.push_back(length);
    return BinaryMask(grid.height(), grid.width(), std::move(runs));
}

DenseMask rle_decode(const BinaryMask& mask) {
    // Re-check: a default-constructed mask bypasses the validating constructor.
    if (auto problem = validate_runs(mask.height(), mask.width(), mask.runs());
        !problem.empty()) {
        fail(ErrorKind::MalformedMask, problem);
    }
    DenseMask grid(mask.height(), mask.width());
    mask.for_each_span([&](std::size_t start, std::size_t len) {
        std::fill_n(grid.values().begin() + static_cast<std::ptrdiff_t>(start), len,
                    std::uint8_t{1});
    });
    return grid;
}

BBox mask_bbox(const BinaryMask& mask) {
    if (mask.is_empty()) {
        fail(ErrorKind::EmptyRegion, "bounding box of an empty mask");
    }
    const std::size_t w = mask.width();
    BBox box{mask.height(), w, 0, 0};
    mask.for_each_span([&](std::size_t start, std::size_t len) {
        const std::size_t end = start + len - 1;
        const std::size_t r0 = start / w;
        const std::size_t r1 = end / w;
        box.row0 = std::min(box.row0, r0);
        box.row1 = std::max(box.row1, r1 + 1);
        if (r0 != r1) {
            // Span wraps across rows, so it covers the full column range between them.
            box.col0 = 0;
            box.col1 = w;
        } else {
            box.col0 = std::min(box.col0, start % w);
            box.col1 = std::max(box.col1, end % w + 1);
        }
    });
    return box;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    if (a.height() != b.height() || a.width() != b.width()) {
        fail(ErrorKind::DimensionMismatch, "mask union of differently sized masks");
    }
    DenseMask grid = rle_decode(a);
    b.for_each_span([&](std::size_t start, std::size_t len) {
        std::fill_n(grid.values().begin() + static_cast<std::ptrdiff_t>(start), len,
                    std::uint8_t{1});
    });
    return rle_encode(grid);
}

std::string_view to_string(Phase phase) {
    return phase == Phase::A ? "phase-a" : "phase-b";
}

void MaskSet::add(BinaryMask mask, Phase source) {
    if (mask.height() != height_ || mask.width() != width_) {
        fail(ErrorKind::DimensionMismatch,
             "mask " + std::to_string(mask.height()) + "x" + std::to_string(mask.width()) +
                 " does not match set frame " + std::to_string(height_) + "x" +
                 std::to_string(width_));
    }
    items_.push_back({std::move(mask), source});
}

}  // namespace adaptcd
