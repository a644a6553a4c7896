#pragma once

#include <filesystem>

#include "adaptcd/image.hpp"
#include "adaptcd/mask.hpp"

namespace adaptcd {

// Reads 8-bit PNGs of any color type; gray is replicated, alpha dropped, 16-bit stripped.
Image read_png_rgb(const std::filesystem::path& path);
void write_png_rgb(const std::filesystem::path& path, const Image& image);

// Grayscale reading/writing for masks: nonzero = set; written as 0/255.
DenseMask read_png_mask(const std::filesystem::path& path);
void write_png_mask(const std::filesystem::path& path, const DenseMask& mask);

}  // namespace adaptcd
