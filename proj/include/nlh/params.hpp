#pragma once

#include <optional>
#include <string>

#include "nlh/haar.hpp"
#include "nlh/image.hpp"

namespace nlh {

enum class Profile { AwgnLow, AwgnHigh, Real, Custom };

/// All tunables of the denoiser. Named profiles:
///   awgn-low  : patch 8,  K=4, stride 4  (synthetic noise, sigma < 50)
///   awgn-high : patch 10, K=5, stride 4  (synthetic noise, sigma >= 50)
///   real      : patch 7,  K=2, stride 3  (real-world photographs)
/// All profiles share W=40, m1=16, q1=4, tau=2, lambda=0.6 and the stage-2
/// group sizes m2=64, q2=8 (set stage2_small() for the 16/4 variant).
struct NlhParams {
    int patch_side = 7;  // sqrt(n)
    int window = 40;     // W: side of the candidate window, in top-left positions
    int m1 = 16;         // similar patches, stage 1
    int q1 = 4;          // similar pixel rows, stage 1
    int m2 = 64;         // similar patches, stage 2
    int q2 = 8;          // similar pixel rows, stage 2
    double tau = 2.0;
    double lambda = 0.6;
    int iterations = 2;  // K, stage-1 feedback iterations
    int stride = 3;
    std::optional<double> sigma_override;  // [0,255] scale; disables blind estimation
    bool reestimate_sigma_per_iter = false;
    ThresholdLaw threshold_law = ThresholdLaw::Sigma;
    // Row-candidate radius for noise estimation: row i considers rows
    // |j - i| <= radius. 0 means every row. Denoising always matches over
    // all rows; this only shapes the estimator's selection pool, whose
    // minimum-value bias is what sets the estimator's scale.
    int sigma_row_radius = 10;

    int patch_pixels() const { return patch_side * patch_side; }
    void stage2_small() { m2 = 16; q2 = 4; }
};

NlhParams profile_params(Profile p);
Profile profile_from_name(const std::string& name);
std::string profile_name(Profile p);

// Throws std::invalid_argument when the parameter set is internally
// inconsistent or cannot serve an image of the given size (including the
// worst-case corner window holding fewer than max(m1,m2) candidates).
void validate_params(const NlhParams& p, int height, int width);

}  // namespace nlh
