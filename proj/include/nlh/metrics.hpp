#pragma once

#include "nlh/image.hpp"

namespace nlh {

struct MetricReport {
    double psnr = 0.0;  // dB
    double ssim = 0.0;
};

// 10*log10(1/MSE) on [0,1] data, capped at 99.0 dB so reports stay finite
// and sortable (MSE = 0 maps to the cap).
double psnr(const Plane& ref, const Plane& test);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 1.0, valid-window positions only. Requires min side >= 11.
double ssim(const Plane& ref, const Plane& test);

// Color variants: PSNR over the pooled per-channel MSE, SSIM averaged over
// the three RGB channels.
double psnr(const ColorImage& ref, const ColorImage& test);
double ssim(const ColorImage& ref, const ColorImage& test);

MetricReport metrics(const Plane& ref, const Plane& test);
MetricReport metrics(const ColorImage& ref, const ColorImage& test);

}  // namespace nlh
