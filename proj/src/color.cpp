#include "nlh/color.hpp"

namespace nlh {

namespace {
// BT.601 luma weights; chroma scaled so that Cb/Cr span [0,1] for RGB in [0,1].
constexpr double kR = 0.299, kG = 0.587, kB = 0.114;
constexpr double kCbDen = 1.772;  // 2*(1-kB)
constexpr double kCrDen = 1.402;  // 2*(1-kR)
}  // namespace

ColorImage rgb_to_ycbcr(const ColorImage& img) {
    if (img.space != ColorSpace::RGB)
        throw std::invalid_argument("rgb_to_ycbcr: input is not tagged RGB");
    const Plane& r = img.planes[0];
    const Plane& g = img.planes[1];
    const Plane& b = img.planes[2];
    ColorImage out;
    out.space = ColorSpace::YCbCr;
    for (auto& p : out.planes) p = Plane(r.height, r.width);
    for (size_t i = 0; i < r.size(); ++i) {
        const double y = kR * r.data[i] + kG * g.data[i] + kB * b.data[i];
        out.planes[0].data[i] = y;
        out.planes[1].data[i] = (b.data[i] - y) / kCbDen + 0.5;
        out.planes[2].data[i] = (r.data[i] - y) / kCrDen + 0.5;
    }
    return out;
}

ColorImage ycbcr_to_rgb(const ColorImage& img) {
    if (img.space != ColorSpace::YCbCr)
        throw std::invalid_argument("ycbcr_to_rgb: input is not tagged YCbCr");
    const Plane& y = img.planes[0];
    const Plane& cb = img.planes[1];
    const Plane& cr = img.planes[2];
    ColorImage out;
    out.space = ColorSpace::RGB;
    for (auto& p : out.planes) p = Plane(y.height, y.width);
    for (size_t i = 0; i < y.size(); ++i) {
        const double r = y.data[i] + kCrDen * (cr.data[i] - 0.5);
        const double b = y.data[i] + kCbDen * (cb.data[i] - 0.5);
        const double g = (y.data[i] - kR * r - kB * b) / kG;
        out.planes[0].data[i] = r;
        out.planes[1].data[i] = g;
        out.planes[2].data[i] = b;
    }
    return out;
}

}  // namespace nlh
