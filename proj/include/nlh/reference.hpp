#pragma once

#include "nlh/pipeline.hpp"

namespace nlh::reference {

// Plain serial implementation of the two-stage denoiser, written with the
// public per-reference operations and no workspace reuse. It must produce
// bitwise-identical planes to the OpenMP engine in nlh::; the tests enforce
// that and bench/ compares their speed.

Plane stage1_pass(const Plane& y_k, double sigma_g, const NlhParams& params);
std::pair<Plane, NoiseEstimate> stage1(const Plane& y, const NlhParams& params);
Plane stage2(const Plane& y, const Plane& basic, double sigma_g, const NlhParams& params);
GrayDenoiseResult denoise_gray(const Plane& y, const NlhParams& params);

std::array<NoiseEstimate, 3> estimate_color(const ColorImage& ycbcr, const NlhParams& params);
ColorDenoiseResult denoise_color(const ColorImage& rgb, const NlhParams& params);

}  // namespace nlh::reference
