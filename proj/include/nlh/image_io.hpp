#pragma once

#include <string>

#include "nlh/image.hpp"

namespace nlh {

/// A decoded image file: either one gray plane or an RGB ColorImage.
struct LoadedImage {
    bool is_color = false;
    Plane gray;
    ColorImage color;  // space == RGB when is_color

    int height() const { return is_color ? color.height() : gray.height; }
    int width() const { return is_color ? color.width() : gray.width; }
};

// Formats: PGM (P5, maxval 255), PPM (P6, maxval 255), PNG (8-bit gray/RGB).
// Stored pixel p maps to intensity p/255; writing quantizes with
// round(clamp(v,0,1)*255). Format is picked from the file extension
// (.pgm/.ppm/.png); loading also sniffs the magic bytes.
LoadedImage load_image(const std::string& path);
void save_gray(const std::string& path, const Plane& img);
void save_color(const std::string& path, const ColorImage& img);  // wants RGB

// Quantization helper shared by all codecs.
inline int quantize8(double v) { return static_cast<int>(clamp01(v) * 255.0 + 0.5); }

}  // namespace nlh
