#include "adaptcd/png_io.hpp"

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

namespace adaptcd {
namespace {

std::vector<std::uint8_t> read_png(const std::filesystem::path& path, png_uint_32 format,
                                   std::size_t channels, std::size_t& height,
                                   std::size_t& width) {
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&img, path.c_str()) == 0) {
        fail(ErrorKind::Io, "cannot read PNG '" + path.string() + "': " + img.message);
    }
    img.format = format;
    height = img.height;
    width = img.width;
    std::vector<std::uint8_t> buffer(static_cast<std::size_t>(img.height) * img.width * channels);
    if (png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr) == 0) {
        const std::string msg = img.message;
        png_image_free(&img);
        fail(ErrorKind::Io, "cannot decode PNG '" + path.string() + "': " + msg);
    }
    return buffer;
}

void write_png(const std::filesystem::path& path, png_uint_32 format, std::size_t height,
               std::size_t width, const std::uint8_t* data) {
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(width);
    img.height = static_cast<png_uint_32>(height);
    img.format = format;
    if (png_image_write_to_file(&img, path.c_str(), 0, data, 0, nullptr) == 0) {
        fail(ErrorKind::Io, "cannot write PNG '" + path.string() + "': " + img.message);
    }
}

}  // namespace

Image read_png_rgb(const std::filesystem::path& path) {
    std::size_t h = 0, w = 0;
    auto data = read_png(path, PNG_FORMAT_RGB, 3, h, w);
    return Image(h, w, std::move(data));
}

void write_png_rgb(const std::filesystem::path& path, const Image& image) {
    write_png(path, PNG_FORMAT_RGB, image.height(), image.width(), image.data().data());
}

DenseMask read_png_mask(const std::filesystem::path& path) {
    std::size_t h = 0, w = 0;
    auto data = read_png(path, PNG_FORMAT_GRAY, 1, h, w);
    for (auto& v : data) {
        v = v != 0 ? 1 : 0;
    }
    return DenseMask(h, w, std::move(data));
}

void write_png_mask(const std::filesystem::path& path, const DenseMask& mask) {
    std::vector<std::uint8_t> gray(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        gray[i] = mask[i] != 0 ? 255 : 0;
    }
    write_png(path, PNG_FORMAT_GRAY, mask.height(), mask.width(), gray.data());
}

}  // namespace adaptcd
