#pragma once

#include <array>
#include <utility>

#include "nlh/estimate.hpp"
#include "nlh/grouping.hpp"
#include "nlh/image.hpp"
#include "nlh/params.hpp"

namespace nlh {

struct PhaseTimings {
    double estimate_s = 0.0;
    double search_s = 0.0;  // patch-search time summed over workers
    double stage1_s = 0.0;
    double stage2_s = 0.0;
    double total_s = 0.0;
};

struct GrayDenoiseResult {
    Plane output;
    Plane basic;
    NoiseEstimate sigma;  // estimate actually used ([0,1] scale)
    PhaseTimings timings;
};

struct ColorDenoiseResult {
    ColorImage output;  // RGB
    ColorImage basic;   // RGB
    std::array<NoiseEstimate, 3> sigma;  // per YCbCr channel
    PhaseTimings timings;
};

// y_k = lambda*prev + (1-lambda)*orig, elementwise.
Plane blend_planes(const Plane& prev, const Plane& orig, double lambda);

// One transform-domain bi-hard-thresholding pass over every reference
// patch of y_k. sigma_g is on the [0,1] scale. Deterministic for any worker
// count; when `search_seconds` is given the per-reference patch-search time
// is accumulated into it.
Plane stage1_pass(const Plane& y_k, double sigma_g, const NlhParams& params, int workers = 1,
                  double* search_seconds = nullptr);

// K feedback iterations (first iteration runs on the raw input). Returns the
// final basic estimate and the sigma in effect for the first iteration.
std::pair<Plane, NoiseEstimate> stage1(const Plane& y, const NlhParams& params, int workers = 1,
                                       PhaseTimings* timings = nullptr);

// Wiener-filter stage: matching runs on `basic`, the filter attenuates the
// transformed groups of `y` with the basic groups as guides.
Plane stage2(const Plane& y, const Plane& basic, double sigma_g, const NlhParams& params,
             int workers = 1, double* search_seconds = nullptr);

GrayDenoiseResult denoise_gray(const Plane& y, const NlhParams& params, int workers = 1);

// Per-channel noise estimates for a YCbCr image: groups are located in Y,
// the row-distance estimator runs on each channel's own pixel rows.
std::array<NoiseEstimate, 3> estimate_color(const ColorImage& ycbcr, const NlhParams& params,
                                            int workers = 1);

// RGB in, RGB out: matching on the (evolving) Y channel, identical group
// geometry applied to Cb and Cr, per-channel sigma.
ColorDenoiseResult denoise_color(const ColorImage& rgb, const NlhParams& params, int workers = 1);

namespace detail {
// Copies stack geometry and regathers the pixel data from `plane`.
void gather_stack_channel(const Plane& plane, const PatchStack& geometry, PatchStack& out);
}  // namespace detail

}  // namespace nlh
