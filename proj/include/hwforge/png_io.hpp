#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "hwforge/error.hpp"
#include "hwforge/image.hpp"
#include "hwforge/rng.hpp"

namespace hwforge {

// Writes an 8-bit grayscale PNG. Compression settings are pinned (zlib level
// 6, no row filtering) so a rerun emits byte-identical files. Row filtering
// is skipped deliberately: the pipeline's images carry per-pixel Gaussian
// noise, which defeats PNG prediction filters anyway.
inline void png_write_gray(const std::filesystem::path& path, const GrayImage& img) {
    if (img.width <= 0 || img.height <= 0)
        throw DataError(Errc::invalid_argument, "png_write_gray: empty image");

    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw IoError("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng write error: " + path.string());
    }

    png_init_io(png, fp);
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() +
                                                 static_cast<std::size_t>(y) * img.width));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(fp) != 0) throw IoError("close failed: " + path.string());
}

// Reads a PNG as 8-bit grayscale. Color inputs are converted with the
// luminance transform 0.299 R + 0.587 G + 0.114 B, rounded to nearest.
inline GrayImage png_read_gray(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;

    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError("cannot read PNG: " + path.string() + " (" + image.message + ")");

    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot decode PNG: " + path.string() + " (" + msg + ")");
    }

    GrayImage out(static_cast<int>(image.width), static_cast<int>(image.height));
    const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
        out.pixels[i] = quantize_intensity(y);
    }
    return out;
}

} // namespace hwforge
