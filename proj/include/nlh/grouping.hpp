#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlh/image.hpp"
#include "nlh/params.hpp"

namespace nlh {

struct Coord {
    int row = 0;
    int col = 0;
    bool operator==(const Coord&) const = default;
};

/// m similar patches stacked as columns. Column j holds the column-scan
/// vectorization of the j-th most similar patch (column 0 is the reference
/// itself); data is row-major n x m so that pixel rows are contiguous.
struct PatchStack {
    int n = 0;     // patch pixel count
    int m = 0;     // number of patches
    int side = 0;  // sqrt(n)
    std::vector<double> data;       // n*m, row-major
    std::vector<Coord> coords;      // top-left per column, coords[0] = reference
    std::vector<double> distances;  // nondecreasing, distances[0] = 0

    double at(int i, int j) const { return data[static_cast<size_t>(i) * m + j]; }
};

/// q similar pixel rows picked from a PatchStack. row_indices[0] is the
/// reference row; row_distances is nondecreasing with a leading 0.
struct PixelRowGroup {
    int q = 0;
    int m = 0;
    std::vector<double> data;  // q*m, row-major
    std::vector<int> row_indices;
    std::vector<double> row_distances;

    double at(int t, int j) const { return data[static_cast<size_t>(t) * m + j]; }
};

/// Sum/weight pair for overlap-averaged write-back.
struct Accumulator {
    Plane sum;
    Plane weight;

    explicit Accumulator(int h, int w) : sum(h, w), weight(h, w) {}
};

// Top-left reference coordinates stepping by `stride` in both axes, plus the
// last valid row/column so every pixel is covered by at least one reference
// patch.
std::vector<Coord> reference_grid(int height, int width, int patch_side, int stride);

// The m most similar patches (reference included) by Euclidean distance over
// a window x window block of candidate top-left positions centered on the
// reference top-left and clamped to the image. Candidate rows span
// [ref - W/2, ref - W/2 + W - 1] per axis before clamping. Ties are broken
// by raster order of the candidate coordinate.
PatchStack search_similar_patches(const Plane& img, Coord ref, int patch_side, int window, int m);

// Euclidean distance between two pixel rows of the stack.
double row_distance(const PatchStack& stack, int i, int j);

// The q rows closest to row i (row i first, then ascending distance, ties by
// smaller row index).
PixelRowGroup select_similar_rows(const PatchStack& stack, int ref_row, int q);

// Adds each group value (and weight 1) at the image location of pixel
// row_indices[t] inside patch j.
void scatter_group(Accumulator& acc, const PixelRowGroup& group,
                   const std::vector<Coord>& stack_coords, int patch_side);

// Element-wise sum/weight; throws naming the first uncovered pixel.
Plane finalize(const Accumulator& acc);

enum class ApdMode { Patch, Pixel };

/// Histogram of per-reference average pixel-wise distances (bin width 0.0005
/// on [0, 0.05], overflow clamped into the last bin) plus their mean.
struct ApdReport {
    static constexpr int kBins = 100;
    static constexpr double kBinWidth = 0.0005;
    std::vector<int64_t> histogram;  // kBins counts
    double apd = 0.0;
};

ApdReport apd_statistics(const Plane& img, ApdMode mode, const NlhParams& params);

// CSV per the nss-stats contract: `bin_low,bin_high,count` rows, then a
// trailing `apd,<value>` record.
void write_apd_csv(const std::string& path, const ApdReport& report);

// Allocation-free variants used by the pipeline engines. Semantics are
// identical to the public operations above (the wrappers call these).
namespace detail {

struct SearchScratch {
    std::vector<std::pair<double, int>> cand;
};

void window_range(int ref, int window, int limit, int& lo, int& hi);
void search_similar_patches_into(const Plane& img, Coord ref, int side, int window, int m,
                                 PatchStack& out, SearchScratch& scratch);
void row_distance_matrix(const PatchStack& stack, std::vector<double>& d2);
void select_rows_into(const PatchStack& stack, const std::vector<double>& d2, int ref_row, int q,
                      PixelRowGroup& out, std::vector<std::pair<double, int>>& scratch);

}  // namespace detail

}  // namespace nlh
