#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace contrack {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense raster with 1 (gray) or 3 (RGB) interleaved channels, row-major,
/// per-pixel values normalized to [0,1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w <= 0 || h <= 0 || (c != 1 && c != 3))
            throw Error("invalid image dimensions");
    }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    double at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
    double& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }

    void validate() const {
        if (data.size() != pixel_count() * channels)
            throw Error("image data length does not match dimensions");
        for (double v : data)
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw Error("image value outside [0,1]");
    }
};

/// Per-pixel boolean region; dimensions always match the companion image.
struct RegionMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> inside;

    RegionMask() = default;
    RegionMask(int w, int h, bool fill = false)
        : width(w), height(h),
          inside(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {
        if (w <= 0 || h <= 0) throw Error("invalid mask dimensions");
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    bool at(int x, int y) const { return inside[index(x, y)] != 0; }
    void set(int x, int y, bool v) { inside[index(x, y)] = v ? 1 : 0; }

    bool same_size(const RegionMask& o) const {
        return width == o.width && height == o.height;
    }
    bool operator==(const RegionMask& o) const {
        return width == o.width && height == o.height && inside == o.inside;
    }
};

/// Pixel count of the region.
inline long region_area(const RegionMask& mask) {
    long n = 0;
    for (std::uint8_t v : mask.inside) n += (v != 0);
    return n;
}

/// Rec.601 luma conversion; 1-channel input is returned unchanged.
inline Image to_grayscale(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.width, img.height, 1);
    const double* src = img.data.data();
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double* p = src + i * 3;
        out.data[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return out;
}

/// Single channel of an RGB image as a 1-channel image.
inline Image extract_channel(const Image& img, int c) {
    if (c < 0 || c >= img.channels) throw Error("channel index out of range");
    if (img.channels == 1) return img;
    Image out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = img.at(x, y, c);
    return out;
}

/// Gradient-magnitude feature: central differences in the interior,
/// one-sided at the borders, pixel spacing 1. The result is divided by its
/// maximum when that maximum exceeds 1, so it shares the [0,1] histogram
/// support with raw intensity.
inline Image gradient_magnitude(const Image& img) {
    if (img.channels != 1) throw Error("gradient_magnitude expects a 1-channel image");
    if (img.width < 3 || img.height < 3)
        throw Error("image too small for gradient_magnitude (need at least 3x3)");
    const int w = img.width, h = img.height;
    Image out(w, h, 1);
    double maxv = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx, gy;
            if (x == 0)          gx = img.at(1, y) - img.at(0, y);
            else if (x == w - 1) gx = img.at(w - 1, y) - img.at(w - 2, y);
            else                 gx = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
            if (y == 0)          gy = img.at(x, 1) - img.at(x, 0);
            else if (y == h - 1) gy = img.at(x, h - 1) - img.at(x, h - 2);
            else                 gy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
            double g = std::sqrt(gx * gx + gy * gy);
            out.at(x, y) = g;
            maxv = std::max(maxv, g);
        }
    }
    if (maxv > 1.0)
        for (double& v : out.data) v /= maxv;
    return out;
}

/// Arithmetic mean of the 1-channel image over the masked pixels.
inline double region_mean(const Image& img, const RegionMask& mask) {
    if (img.channels != 1) throw Error("region_mean expects a 1-channel image");
    if (img.width != mask.width || img.height != mask.height)
        throw Error("image/mask dimension mismatch");
    double sum = 0.0;
    long n = 0;
    for (std::size_t i = 0; i < mask.inside.size(); ++i) {
        if (mask.inside[i]) {
            sum += img.data[i];
            ++n;
        }
    }
    if (n == 0) throw Error("empty region");
    return sum / static_cast<double>(n);
}

} // namespace contrack
