#pragma once

#include "nlh/image.hpp"

namespace nlh {

// Full-range BT.601 conversions on [0,1] data. Y in [0,1], Cb/Cr centered
// at 0.5. ycbcr_to_rgb is the exact algebraic inverse; nothing is clamped
// here (clamping happens at image write only).
ColorImage rgb_to_ycbcr(const ColorImage& img);
ColorImage ycbcr_to_rgb(const ColorImage& img);

}  // namespace nlh
