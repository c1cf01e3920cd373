#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nlh {

/// One real-valued image channel, row-major, intensities nominally in [0,1].
/// Intermediate results may leave [0,1]; values are clamped only at I/O.
struct Plane {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {
        if (h <= 0 || w <= 0) throw std::invalid_argument("Plane: non-positive dimensions");
    }

    double& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
    size_t size() const { return data.size(); }
    bool same_shape(const Plane& o) const { return height == o.height && width == o.width; }
};

enum class ColorSpace { RGB, YCbCr };

/// Three equally sized planes plus a tag describing their current space.
struct ColorImage {
    std::array<Plane, 3> planes;
    ColorSpace space = ColorSpace::RGB;

    int height() const { return planes[0].height; }
    int width() const { return planes[0].width; }
};

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline Plane crop(const Plane& p, int r0, int c0, int h, int w) {
    if (r0 < 0 || c0 < 0 || r0 + h > p.height || c0 + w > p.width)
        throw std::invalid_argument("crop: window out of bounds");
    Plane out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = p.at(r0 + r, c0 + c);
    return out;
}

}  // namespace nlh
