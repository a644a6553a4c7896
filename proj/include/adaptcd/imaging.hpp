#pragma once

#include <cstddef>
#include <vector>

#include "adaptcd/features.hpp"
#include "adaptcd/image.hpp"
#include "adaptcd/mask.hpp"

namespace adaptcd {

// 3x3 binary dilation repeated `iterations` times. Neighborhoods are clipped at the
// frame border (no wraparound).
BinaryMask dilate_3x3(const BinaryMask& mask, std::size_t iterations);
DenseMask dilate_3x3(const DenseMask& grid, std::size_t iterations);

// Per-pixel sqrt(Gx^2 + Gy^2) with the standard 3x3 Sobel kernels and replicate padding.
// Requires at least a 3x3 grid.
RealGrid sobel_magnitude(const RealGrid& map);

// Half-pixel-center bilinear resampling (align-corners off), edge samples clamped.
DenseFeatureMap bilinear_upsample(const DenseFeatureMap& map, std::size_t height,
                                  std::size_t width);

// Mean over a (2r+1)^2 window with replicate padding.
RealGrid box_blur(const RealGrid& map, std::size_t radius);

struct Component {
    std::size_t label = 0;               // 1..K
    std::vector<std::size_t> pixels;     // row-major linear indices, ascending
    std::size_t area() const noexcept { return pixels.size(); }
};

struct ComponentLabeling {
    Grid<std::uint32_t> labels;          // 0 = background
    std::vector<Component> components;   // components[k-1] has label k
};

// 8-connected labeling. Labels are assigned in raster order of each component's first pixel.
ComponentLabeling connected_components_8(const BinaryMask& mask);
ComponentLabeling connected_components_8(const DenseMask& grid);

}  // namespace adaptcd
