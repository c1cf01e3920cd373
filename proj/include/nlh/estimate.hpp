#pragma once

#include <cstdint>
#include <vector>

#include "nlh/grouping.hpp"
#include "nlh/image.hpp"
#include "nlh/params.hpp"

namespace nlh {

/// Per-group noise levels and their mean, on the internal [0,1] scale.
struct NoiseEstimate {
    std::vector<double> sigma_locals;
    double sigma_global = 0.0;

    double global_255() const { return 255.0 * sigma_global; }
};

// Local noise level of one patch stack: for every pixel row, its q nearest
// rows are selected (select_similar_rows tie rule, candidates restricted to
// |j - i| <= row_radius when row_radius > 0) and the non-self distances d
// contribute d/sqrt(m); the result is the mean over the n*(q-1)
// contributions.
double sigma_local(const PatchStack& stack, int q, int row_radius = 10);

// Blind global estimate: mean of sigma_local over every reference patch of
// the grid (stage-1 group sizes m1/q1). Deterministic for any worker count.
NoiseEstimate sigma_global(const Plane& img, const NlhParams& params, int workers = 1);

/// Residual histogram restricted to pixels gathered into similar-pixel
/// groups: bins of width 1/255 over [-0.2, 0.2], one count per group-pixel
/// occurrence.
struct ResidualHistogram {
    static constexpr double kLo = -0.2;
    static constexpr double kBinWidth = 1.0 / 255.0;
    static constexpr int kBins = 102;     // ceil(0.4 * 255)
    static constexpr int kZeroBin = 51;   // bin whose range contains 0
    std::vector<int64_t> counts;
};

// Groups are gathered on `noisy` (grid + patch search + row selection with
// the stage-1 sizes); each gathered pixel contributes noisy - reference.
ResidualHistogram residual_histogram(const Plane& noisy, const Plane& reference,
                                     const NlhParams& params);

namespace detail {
// Estimator core given a precomputed squared row-distance matrix.
double sigma_local_from_d2(const PatchStack& stack, const std::vector<double>& d2, int q,
                           int row_radius, std::vector<std::pair<double, int>>& scratch);
}  // namespace detail

}  // namespace nlh
