#include "nlh/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

namespace nlh {

namespace detail {

void window_range(int ref, int window, int limit, int& lo, int& hi) {
    lo = std::max(0, ref - window / 2);
    hi = std::min(limit, ref - window / 2 + window - 1);
}

// Squared Euclidean distance between the patches at `a` and `b`, accumulated
// in local row order. Bails out once the partial sum exceeds `cutoff`.
inline double patch_ssd(const Plane& img, Coord a, Coord b, int side, double cutoff) {
    double acc = 0.0;
    for (int r = 0; r < side; ++r) {
        const double* pa = &img.data[static_cast<size_t>(a.row + r) * img.width + a.col];
        const double* pb = &img.data[static_cast<size_t>(b.row + r) * img.width + b.col];
        for (int c = 0; c < side; ++c) {
            const double d = pa[c] - pb[c];
            acc += d * d;
        }
        if (acc > cutoff) return acc;
    }
    return acc;
}

void search_similar_patches_into(const Plane& img, Coord ref, int side, int window, int m,
                                 PatchStack& out, SearchScratch& scratch) {
    int rlo, rhi, clo, chi;
    window_range(ref.row, window, img.height - side, rlo, rhi);
    window_range(ref.col, window, img.width - side, clo, chi);
    const long navail = static_cast<long>(rhi - rlo + 1) * (chi - clo + 1);
    if (navail < m)
        throw std::invalid_argument("search_similar_patches: fewer candidates than m");

    // The reference occupies column 0 unconditionally; the remaining m-1
    // columns are the best other candidates as a max-heap over
    // (distance^2, raster index).
    auto& heap = scratch.cand;
    heap.clear();
    const int keep = m - 1;
    double worst = std::numeric_limits<double>::infinity();
    for (int r = rlo; r <= rhi; ++r) {
        for (int c = clo; c <= chi; ++c) {
            if (r == ref.row && c == ref.col) continue;
            if (keep == 0) continue;
            const int idx = r * img.width + c;
            const double d2 = patch_ssd(img, ref, {r, c}, side, worst);
            const std::pair<double, int> cand{d2, idx};
            if (static_cast<int>(heap.size()) < keep) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
                if (static_cast<int>(heap.size()) == keep) worst = heap.front().first;
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
                worst = heap.front().first;
            }
        }
    }
    std::sort(heap.begin(), heap.end());
    heap.insert(heap.begin(), {0.0, ref.row * img.width + ref.col});

    const int n = side * side;
    out.n = n;
    out.m = m;
    out.side = side;
    out.data.resize(static_cast<size_t>(n) * m);
    out.coords.resize(m);
    out.distances.resize(m);
    for (int j = 0; j < m; ++j) {
        const Coord pc{heap[j].second / img.width, heap[j].second % img.width};
        out.coords[j] = pc;
        out.distances[j] = std::sqrt(heap[j].first);
        // column-scan vectorization: pixel index i = c_local*side + r_local
        for (int cl = 0; cl < side; ++cl)
            for (int rl = 0; rl < side; ++rl)
                out.data[static_cast<size_t>(cl * side + rl) * m + j] =
                    img.at(pc.row + rl, pc.col + cl);
    }
}

void row_distance_matrix(const PatchStack& stack, std::vector<double>& d2) {
    const int n = stack.n, m = stack.m;
    d2.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* ri = &stack.data[static_cast<size_t>(i) * m];
        for (int j = i + 1; j < n; ++j) {
            const double* rj = &stack.data[static_cast<size_t>(j) * m];
            double acc = 0.0;
            for (int k = 0; k < m; ++k) {
                const double d = ri[k] - rj[k];
                acc += d * d;
            }
            d2[static_cast<size_t>(i) * n + j] = acc;
            d2[static_cast<size_t>(j) * n + i] = acc;
        }
    }
}

void select_rows_into(const PatchStack& stack, const std::vector<double>& d2, int ref_row, int q,
                      PixelRowGroup& out, std::vector<std::pair<double, int>>& scratch) {
    const int n = stack.n, m = stack.m;
    scratch.clear();
    const double* row = &d2[static_cast<size_t>(ref_row) * n];
    for (int j = 0; j < n; ++j)
        if (j != ref_row) scratch.emplace_back(row[j], j);
    std::partial_sort(scratch.begin(), scratch.begin() + (q - 1), scratch.end());

    out.q = q;
    out.m = m;
    out.data.resize(static_cast<size_t>(q) * m);
    out.row_indices.resize(q);
    out.row_distances.resize(q);
    out.row_indices[0] = ref_row;
    out.row_distances[0] = 0.0;
    for (int t = 1; t < q; ++t) {
        out.row_indices[t] = scratch[t - 1].second;
        out.row_distances[t] = std::sqrt(scratch[t - 1].first);
    }
    for (int t = 0; t < q; ++t)
        std::memcpy(&out.data[static_cast<size_t>(t) * m],
                    &stack.data[static_cast<size_t>(out.row_indices[t]) * m],
                    static_cast<size_t>(m) * sizeof(double));
}

}  // namespace detail

std::vector<Coord> reference_grid(int height, int width, int patch_side, int stride) {
    if (patch_side > std::min(height, width))
        throw std::invalid_argument("reference_grid: image smaller than patch");
    if (stride < 1) throw std::invalid_argument("reference_grid: stride must be >= 1");

    auto axis = [&](int limit) {
        std::vector<int> v;
        for (int p = 0; p <= limit; p += stride) v.push_back(p);
        if (v.back() != limit) v.push_back(limit);
        return v;
    };
    const std::vector<int> rows = axis(height - patch_side);
    const std::vector<int> cols = axis(width - patch_side);
    std::vector<Coord> out;
    out.reserve(rows.size() * cols.size());
    for (int r : rows)
        for (int c : cols) out.push_back({r, c});
    return out;
}

PatchStack search_similar_patches(const Plane& img, Coord ref, int patch_side, int window, int m) {
    if (m < 1) throw std::invalid_argument("search_similar_patches: m must be >= 1");
    if (ref.row < 0 || ref.col < 0 || ref.row + patch_side > img.height ||
        ref.col + patch_side > img.width)
        throw std::invalid_argument("search_similar_patches: reference out of bounds");
    PatchStack out;
    detail::SearchScratch scratch;
    detail::search_similar_patches_into(img, ref, patch_side, window, m, out, scratch);
    return out;
}

double row_distance(const PatchStack& stack, int i, int j) {
    if (i < 0 || j < 0 || i >= stack.n || j >= stack.n)
        throw std::invalid_argument("row_distance: index out of range");
    const double* ri = &stack.data[static_cast<size_t>(i) * stack.m];
    const double* rj = &stack.data[static_cast<size_t>(j) * stack.m];
    double acc = 0.0;
    for (int k = 0; k < stack.m; ++k) {
        const double d = ri[k] - rj[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

PixelRowGroup select_similar_rows(const PatchStack& stack, int ref_row, int q) {
    if (q > stack.n) throw std::invalid_argument("select_similar_rows: q exceeds row count");
    if (q < 1 || !is_power_of_two(q))
        throw std::invalid_argument("select_similar_rows: q must be a power of 2");
    if (ref_row < 0 || ref_row >= stack.n)
        throw std::invalid_argument("select_similar_rows: reference row out of range");
    std::vector<double> d2;
    detail::row_distance_matrix(stack, d2);
    PixelRowGroup out;
    std::vector<std::pair<double, int>> scratch;
    detail::select_rows_into(stack, d2, ref_row, q, out, scratch);
    return out;
}

void scatter_group(Accumulator& acc, const PixelRowGroup& group,
                   const std::vector<Coord>& stack_coords, int patch_side) {
    for (int t = 0; t < group.q; ++t) {
        const int p = group.row_indices[t];
        const int rl = p % patch_side;
        const int cl = p / patch_side;
        for (int j = 0; j < group.m; ++j) {
            const int r = stack_coords[j].row + rl;
            const int c = stack_coords[j].col + cl;
            acc.sum.at(r, c) += group.at(t, j);
            acc.weight.at(r, c) += 1.0;
        }
    }
}

Plane finalize(const Accumulator& acc) {
    Plane out(acc.sum.height, acc.sum.width);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) {
            const double w = acc.weight.at(r, c);
            if (w <= 0.0)
                throw std::runtime_error("finalize: zero weight at pixel (" + std::to_string(r) +
                                         "," + std::to_string(c) + ")");
            out.at(r, c) = acc.sum.at(r, c) / w;
        }
    return out;
}

ApdReport apd_statistics(const Plane& img, ApdMode mode, const NlhParams& params) {
    validate_params(params, img.height, img.width);
    const auto refs = reference_grid(img.height, img.width, params.patch_side, params.stride);
    ApdReport rep;
    rep.histogram.assign(ApdReport::kBins, 0);
    double total = 0.0;
    long count = 0;

    auto record = [&](double v) {
        int bin = static_cast<int>(v / ApdReport::kBinWidth);
        if (bin >= ApdReport::kBins) bin = ApdReport::kBins - 1;
        ++rep.histogram[bin];
        total += v;
        ++count;
    };

    PatchStack stack;
    detail::SearchScratch search_scratch;
    std::vector<double> d2;
    std::vector<std::pair<double, int>> row_scratch;
    PixelRowGroup group;
    const double n = static_cast<double>(params.patch_pixels());
    for (const Coord& ref : refs) {
        detail::search_similar_patches_into(img, ref, params.patch_side, params.window, params.m1,
                                            stack, search_scratch);
        if (mode == ApdMode::Patch) {
            double mean = 0.0;
            for (double d : stack.distances) mean += d;
            record(mean / params.m1 / n);
        } else {
            detail::row_distance_matrix(stack, d2);
            for (int i = 0; i < stack.n; ++i) {
                detail::select_rows_into(stack, d2, i, params.q1, group, row_scratch);
                double mean = 0.0;
                for (double d : group.row_distances) mean += d;
                record(mean / params.q1 / n);
            }
        }
    }
    rep.apd = count ? total / count : 0.0;
    return rep;
}

void write_apd_csv(const std::string& path, const ApdReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "bin_low,bin_high,count\n";
    char buf[96];
    for (int b = 0; b < ApdReport::kBins; ++b) {
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,%lld\n", b * ApdReport::kBinWidth,
                      (b + 1) * ApdReport::kBinWidth,
                      static_cast<long long>(report.histogram[b]));
        out << buf;
    }
    out << "apd," << report.apd << "\n";
}

}  // namespace nlh
