#pragma once

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "contrack/image.hpp"
#include "contrack/levelset.hpp"

namespace contrack {

namespace detail {

inline std::uint8_t to_byte(double v) {
    const double s = v * 255.0 + 0.5;
    return static_cast<std::uint8_t>(s < 0 ? 0 : (s > 255 ? 255 : s));
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] inline void png_error_fn(png_structp png, png_const_charp msg) {
    (void)png;
    throw Error(std::string("unreadable image: ") + (msg ? msg : "libpng error"));
}
inline void png_warn_fn(png_structp, png_const_charp) {}

inline std::vector<std::uint8_t> read_pnm_bytes(std::FILE* f, const std::string& path,
                                                int& w, int& h, int& channels) {
    // Binary PGM (P5) / PPM (P6), maxval <= 255.
    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = std::fgetc(f)) != EOF) {
            if (c == '#') {
                while ((c = std::fgetc(f)) != EOF && c != '\n') {}
            } else if (!std::isspace(c)) {
                tok.push_back(static_cast<char>(c));
                while ((c = std::fgetc(f)) != EOF && !std::isspace(c))
                    tok.push_back(static_cast<char>(c));
                return tok;
            }
        }
        throw Error("unreadable image: truncated PNM header in " + path);
    };
    const std::string magic = next_token();
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw Error("unreadable image: unsupported PNM type in " + path);
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w <= 0 || h <= 0) throw Error("unreadable image: bad PNM dimensions in " + path);
    if (maxval <= 0 || maxval > 255)
        throw Error("unreadable image: only 8-bit PNM supported in " + path);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * channels);
    if (std::fread(bytes.data(), 1, bytes.size(), f) != bytes.size())
        throw Error("unreadable image: truncated PNM data in " + path);
    return bytes;
}

inline std::vector<std::uint8_t> read_png_bytes(std::FILE* f, const std::string& path,
                                                int& w, int& h, int& channels) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
    if (!png) throw Error("unreadable image: " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("unreadable image: " + path);
    }
    std::vector<std::uint8_t> bytes;
    try {
        png_init_io(png, f);
        png_read_info(png, info);

        // Normalize to 8-bit gray or RGB.
        png_set_expand(png);
        png_set_strip_16(png);
        png_set_strip_alpha(png);
        png_read_update_info(png, info);

        w = static_cast<int>(png_get_image_width(png, info));
        h = static_cast<int>(png_get_image_height(png, info));
        channels = static_cast<int>(png_get_channels(png, info));
        if (channels != 1 && channels != 3)
            throw Error("unreadable image: unsupported channel count in " + path);

        const std::size_t stride = png_get_rowbytes(png, info);
        bytes.resize(stride * h);
        std::vector<png_bytep> rows(h);
        for (int y = 0; y < h; ++y) rows[y] = bytes.data() + stride * y;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return bytes;
}

} // namespace detail

/// Loads a PNG / binary PGM / binary PPM image and normalizes values to [0,1].
inline Image read_image(const std::string& path) {
    detail::FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw Error("missing file: " + path);
    unsigned char magic[2] = {0, 0};
    if (std::fread(magic, 1, 2, f.get()) != 2)
        throw Error("unreadable image: " + path);
    std::rewind(f.get());

    int w = 0, h = 0, channels = 0;
    std::vector<std::uint8_t> bytes;
    if (magic[0] == 0x89 && magic[1] == 'P')
        bytes = detail::read_png_bytes(f.get(), path, w, h, channels);
    else if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'))
        bytes = detail::read_pnm_bytes(f.get(), path, w, h, channels);
    else
        throw Error("unreadable image: unsupported format in " + path);

    Image img(w, h, channels);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = bytes[i] / 255.0;
    return img;
}

/// Writes an 8-bit gray or RGB PNG.
inline void write_png(const std::string& path, const Image& img) {
    detail::FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw Error("cannot write file: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              detail::png_error_fn, detail::png_warn_fn);
    if (!png) throw Error("cannot write file: " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("cannot write file: " + path);
    }
    try {
        png_init_io(png, f.get());
        png_set_IHDR(png, info, img.width, img.height, 8,
                     img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * img.channels);
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < img.channels; ++c)
                    row[static_cast<std::size_t>(x) * img.channels + c] =
                        detail::to_byte(img.at(x, y, c));
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

/// Mask convention for image files: luminance > 127 (8-bit) means inside.
inline RegionMask image_to_mask(const Image& img) {
    const Image gray = to_grayscale(img);
    RegionMask m(img.width, img.height);
    for (std::size_t i = 0; i < gray.data.size(); ++i)
        m.inside[i] = gray.data[i] * 255.0 > 127.0 ? 1 : 0;
    return m;
}

inline RegionMask read_mask(const std::string& path) {
    return image_to_mask(read_image(path));
}

inline void write_mask_png(const std::string& path, const RegionMask& mask) {
    Image img(mask.width, mask.height, 1);
    for (std::size_t i = 0; i < mask.inside.size(); ++i)
        img.data[i] = mask.inside[i] ? 1.0 : 0.0;
    write_png(path, img);
}

/// Frame with the region boundary drawn as a 1-px pure green outline.
inline Image overlay_boundary(const Image& frame, const RegionMask& mask) {
    if (frame.width != mask.width || frame.height != mask.height)
        throw Error("image/mask dimension mismatch");
    Image out(frame.width, frame.height, 3);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = frame.channels == 3 ? frame.at(x, y, c) : frame.at(x, y);
    for (const auto& [x, y] : boundary_pixels(mask)) {
        out.at(x, y, 0) = 0.0;
        out.at(x, y, 1) = 1.0;
        out.at(x, y, 2) = 0.0;
    }
    return out;
}

// Debug grid dump: 8-byte header (width, height as u32 LE) then row-major
// float32 LE samples.

inline void write_grid_dump(const std::string& path, const LevelSetGrid& g) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path);
    auto put_u32 = [&](std::uint32_t v) {
        const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
        f.write(b, 4);
    };
    put_u32(static_cast<std::uint32_t>(g.width));
    put_u32(static_cast<std::uint32_t>(g.height));
    for (double d : g.u) {
        const float v = static_cast<float>(d);
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(bits);
    }
    if (!f) throw Error("cannot write file: " + path);
}

inline LevelSetGrid read_grid_dump(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("missing file: " + path);
    auto get_u32 = [&]() -> std::uint32_t {
        unsigned char b[4];
        if (!f.read(reinterpret_cast<char*>(b), 4))
            throw Error("unreadable grid dump: " + path);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    };
    const int w = static_cast<int>(get_u32());
    const int h = static_cast<int>(get_u32());
    if (w <= 0 || h <= 0 || static_cast<long>(w) * h > (1L << 28))
        throw Error("unreadable grid dump: bad header in " + path);
    LevelSetGrid g(w, h);
    for (double& d : g.u) {
        const std::uint32_t bits = get_u32();
        float v;
        std::memcpy(&v, &bits, 4);
        d = v;
    }
    return g;
}

} // namespace contrack
