#include "nlh/estimate.hpp"

#include <cmath>

#include "nlh/parallel.hpp"

namespace nlh {

namespace detail {

double sigma_local_from_d2(const PatchStack& stack, const std::vector<double>& d2, int q,
                           int row_radius, std::vector<std::pair<double, int>>& scratch) {
    const int n = stack.n;
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(stack.m));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        scratch.clear();
        const int lo = row_radius > 0 ? std::max(0, i - row_radius) : 0;
        const int hi = row_radius > 0 ? std::min(n - 1, i + row_radius) : n - 1;
        const double* row = &d2[static_cast<size_t>(i) * n];
        for (int j = lo; j <= hi; ++j)
            if (j != i) scratch.emplace_back(row[j], j);
        const int take = std::min<int>(q - 1, static_cast<int>(scratch.size()));
        std::partial_sort(scratch.begin(), scratch.begin() + take, scratch.end());
        for (int t = 0; t < take; ++t) acc += std::sqrt(scratch[t].first) * inv_sqrt_m;
    }
    return acc / (static_cast<double>(n) * (q - 1));
}

}  // namespace detail

double sigma_local(const PatchStack& stack, int q, int row_radius) {
    if (q < 2) throw std::invalid_argument("sigma_local: q must be >= 2");
    if (q > stack.n) throw std::invalid_argument("sigma_local: q exceeds row count");
    std::vector<double> d2;
    detail::row_distance_matrix(stack, d2);
    std::vector<std::pair<double, int>> scratch;
    return detail::sigma_local_from_d2(stack, d2, q, row_radius, scratch);
}

NoiseEstimate sigma_global(const Plane& img, const NlhParams& params, int workers) {
    validate_params(params, img.height, img.width);
    const auto refs = reference_grid(img.height, img.width, params.patch_side, params.stride);

    NoiseEstimate est;
    est.sigma_locals.assign(refs.size(), 0.0);

    struct Slot {
        double sigma = 0.0;
        PatchStack stack;
        detail::SearchScratch search;
        std::vector<double> d2;
        std::vector<std::pair<double, int>> rows;
    };
    parallel_for_ordered<Slot>(
        static_cast<int>(refs.size()), workers,
        [&](int i, Slot& s) {
            detail::search_similar_patches_into(img, refs[i], params.patch_side, params.window,
                                                params.m1, s.stack, s.search);
            detail::row_distance_matrix(s.stack, s.d2);
            s.sigma = detail::sigma_local_from_d2(s.stack, s.d2, params.q1,
                                                  params.sigma_row_radius, s.rows);
        },
        [&](int i, Slot& s) { est.sigma_locals[i] = s.sigma; });

    double acc = 0.0;
    for (double v : est.sigma_locals) acc += v;
    est.sigma_global = refs.empty() ? 0.0 : acc / static_cast<double>(refs.size());
    return est;
}

ResidualHistogram residual_histogram(const Plane& noisy, const Plane& reference,
                                     const NlhParams& params) {
    if (!noisy.same_shape(reference))
        throw std::invalid_argument("residual_histogram: dimension mismatch");
    validate_params(params, noisy.height, noisy.width);

    ResidualHistogram hist;
    hist.counts.assign(ResidualHistogram::kBins, 0);
    const auto refs = reference_grid(noisy.height, noisy.width, params.patch_side, params.stride);

    PatchStack stack;
    detail::SearchScratch search;
    std::vector<double> d2;
    std::vector<std::pair<double, int>> rows;
    PixelRowGroup group;
    for (const Coord& ref : refs) {
        detail::search_similar_patches_into(noisy, ref, params.patch_side, params.window,
                                            params.m1, stack, search);
        detail::row_distance_matrix(stack, d2);
        for (int i = 0; i < stack.n; ++i) {
            detail::select_rows_into(stack, d2, i, params.q1, group, rows);
            for (int t = 0; t < group.q; ++t) {
                const int p = group.row_indices[t];
                const int rl = p % stack.side;
                const int cl = p / stack.side;
                for (int j = 0; j < group.m; ++j) {
                    const int r = stack.coords[j].row + rl;
                    const int c = stack.coords[j].col + cl;
                    const double res = noisy.at(r, c) - reference.at(r, c);
                    int bin = static_cast<int>((res - ResidualHistogram::kLo) /
                                               ResidualHistogram::kBinWidth);
                    bin = std::max(0, std::min(ResidualHistogram::kBins - 1, bin));
                    ++hist.counts[bin];
                }
            }
        }
    }
    return hist;
}

}  // namespace nlh
