#include "nlh/reference.hpp"

#include <algorithm>
#include <cmath>

#include "nlh/color.hpp"
#include "nlh/haar.hpp"

namespace nlh::reference {

namespace {

// All pairwise squared row distances of a stack. Selection happens on the
// squared values so ties resolve exactly as in the parallel engine.
std::vector<double> all_row_distances(const PatchStack& stack) {
    std::vector<double> d(static_cast<size_t>(stack.n) * stack.n, 0.0);
    for (int i = 0; i < stack.n; ++i)
        for (int j = i + 1; j < stack.n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < stack.m; ++k) {
                const double diff = stack.at(i, k) - stack.at(j, k);
                acc += diff * diff;
            }
            d[static_cast<size_t>(i) * stack.n + j] = acc;
            d[static_cast<size_t>(j) * stack.n + i] = acc;
        }
    return d;
}

std::vector<int> nearest_rows(const std::vector<double>& dist, int n, int ref_row, int q) {
    std::vector<std::pair<double, int>> order;
    order.reserve(n - 1);
    for (int j = 0; j < n; ++j)
        if (j != ref_row) order.emplace_back(dist[static_cast<size_t>(ref_row) * n + j], j);
    std::sort(order.begin(), order.end());
    std::vector<int> idx(q);
    idx[0] = ref_row;
    for (int t = 1; t < q; ++t) idx[t] = order[t - 1].second;
    return idx;
}

Mat gather(const Plane& plane, const std::vector<Coord>& coords, int side,
           const std::vector<int>& idx, int m) {
    Mat g(static_cast<int>(idx.size()), m);
    for (size_t t = 0; t < idx.size(); ++t) {
        const int rl = idx[t] % side;
        const int cl = idx[t] / side;
        for (int j = 0; j < m; ++j)
            g.at(static_cast<int>(t), j) = plane.at(coords[j].row + rl, coords[j].col + cl);
    }
    return g;
}

// Per-reference aggregation buffer, mirroring the engine's write-back:
// groups accumulate patch-locally in the row-coefficient domain; the linear
// inverse row transform runs once on the sums at flush time.
struct RefSums {
    Mat sum, count;

    RefSums(int n, int m) : sum(n, m, 0.0), count(n, m, 0.0) {}
    void add(const std::vector<int>& idx, const Mat& values) {
        for (int t = 0; t < values.rows; ++t)
            for (int j = 0; j < values.cols; ++j) {
                sum.at(idx[t], j) += values.at(t, j);
                count.at(idx[t], j) += 1.0;
            }
    }
    void flush(Accumulator& acc, const std::vector<Coord>& coords, int side) {
        std::vector<double> scratch;
        haar_inverse_rows(sum.data.data(), sum.rows, sum.cols, scratch);
        for (int p = 0; p < sum.rows; ++p) {
            const int rl = p % side;
            const int cl = p / side;
            for (int j = 0; j < sum.cols; ++j) {
                if (count.at(p, j) == 0.0) continue;
                acc.sum.at(coords[j].row + rl, coords[j].col + cl) += sum.at(p, j);
                acc.weight.at(coords[j].row + rl, coords[j].col + cl) += count.at(p, j);
            }
        }
    }
};

NoiseEstimate override_estimate(double sigma255) {
    NoiseEstimate est;
    est.sigma_global = sigma255 / 255.0;
    return est;
}

}  // namespace

Plane stage1_pass(const Plane& y_k, double sigma_g, const NlhParams& p) {
    validate_params(p, y_k.height, y_k.width);
    Accumulator acc(y_k.height, y_k.width);
    std::vector<double> scratch;
    for (const Coord& ref : reference_grid(y_k.height, y_k.width, p.patch_side, p.stride)) {
        const PatchStack stack = search_similar_patches(y_k, ref, p.patch_side, p.window, p.m1);
        const auto dist = all_row_distances(stack);
        RefSums sums(stack.n, p.m1);
        for (int i = 0; i < stack.n; ++i) {
            const auto idx = nearest_rows(dist, stack.n, i, p.q1);
            Mat g = gather(y_k, stack.coords, p.patch_side, idx, p.m1);
            haar_forward_2d(g);
            bi_hard_threshold(g, sigma_g, p.tau, p.threshold_law);
            haar_inverse_cols(g.data.data(), g.rows, g.cols, scratch);
            sums.add(idx, g);
        }
        sums.flush(acc, stack.coords, p.patch_side);
    }
    return finalize(acc);
}

std::pair<Plane, NoiseEstimate> stage1(const Plane& y, const NlhParams& p) {
    validate_params(p, y.height, y.width);
    NoiseEstimate est =
        p.sigma_override ? override_estimate(*p.sigma_override) : sigma_global(y, p, 1);
    Plane yhat = y;
    for (int k = 1; k <= p.iterations; ++k) {
        const Plane y_k = (k == 1) ? y : blend_planes(yhat, y, p.lambda);
        double sig = est.sigma_global;
        if (p.reestimate_sigma_per_iter && !p.sigma_override && k > 1)
            sig = sigma_global(y_k, p, 1).sigma_global;
        yhat = nlh::reference::stage1_pass(y_k, sig, p);
    }
    return {std::move(yhat), std::move(est)};
}

Plane stage2(const Plane& y, const Plane& basic, double sigma_g, const NlhParams& p) {
    if (!y.same_shape(basic)) throw std::invalid_argument("stage2: dimension mismatch");
    validate_params(p, y.height, y.width);
    Accumulator acc(y.height, y.width);
    std::vector<double> scratch;
    for (const Coord& ref : reference_grid(y.height, y.width, p.patch_side, p.stride)) {
        const PatchStack stack = search_similar_patches(basic, ref, p.patch_side, p.window, p.m2);
        const auto dist = all_row_distances(stack);
        RefSums sums(stack.n, p.m2);
        for (int i = 0; i < stack.n; ++i) {
            const auto idx = nearest_rows(dist, stack.n, i, p.q2);
            Mat guide = gather(basic, stack.coords, p.patch_side, idx, p.m2);
            Mat noisy = gather(y, stack.coords, p.patch_side, idx, p.m2);
            haar_forward_2d(guide);
            haar_forward_2d(noisy);
            wiener_shrink(noisy, guide, sigma_g);
            haar_inverse_cols(noisy.data.data(), noisy.rows, noisy.cols, scratch);
            sums.add(idx, noisy);
        }
        sums.flush(acc, stack.coords, p.patch_side);
    }
    return finalize(acc);
}

GrayDenoiseResult denoise_gray(const Plane& y, const NlhParams& p) {
    GrayDenoiseResult res;
    auto [basic, est] = nlh::reference::stage1(y, p);
    res.basic = std::move(basic);
    res.sigma = std::move(est);
    res.output = nlh::reference::stage2(y, res.basic, res.sigma.sigma_global, p);
    return res;
}

std::array<NoiseEstimate, 3> estimate_color(const ColorImage& ycbcr, const NlhParams& p) {
    if (ycbcr.space != ColorSpace::YCbCr)
        throw std::invalid_argument("estimate_color: image must be YCbCr");
    const Plane& luma = ycbcr.planes[0];
    validate_params(p, luma.height, luma.width);

    std::array<NoiseEstimate, 3> est;
    for (const Coord& ref : reference_grid(luma.height, luma.width, p.patch_side, p.stride)) {
        const PatchStack ystack = search_similar_patches(luma, ref, p.patch_side, p.window, p.m1);
        for (int c = 0; c < 3; ++c) {
            PatchStack cstack;
            nlh::detail::gather_stack_channel(ycbcr.planes[c], ystack, cstack);
            est[c].sigma_locals.push_back(sigma_local(cstack, p.q1, p.sigma_row_radius));
        }
    }
    for (auto& e : est) {
        double acc = 0.0;
        for (double v : e.sigma_locals) acc += v;
        e.sigma_global = e.sigma_locals.empty() ? 0.0 : acc / e.sigma_locals.size();
    }
    return est;
}

ColorDenoiseResult denoise_color(const ColorImage& rgb, const NlhParams& p) {
    if (rgb.space != ColorSpace::RGB)
        throw std::invalid_argument("denoise_color: image must be RGB");
    ColorDenoiseResult res;
    const ColorImage ycc = rgb_to_ycbcr(rgb);
    validate_params(p, ycc.height(), ycc.width());

    if (p.sigma_override)
        for (auto& e : res.sigma) e = override_estimate(*p.sigma_override);
    else
        res.sigma = nlh::reference::estimate_color(ycc, p);
    std::array<double, 3> sigmas = {res.sigma[0].sigma_global, res.sigma[1].sigma_global,
                                    res.sigma[2].sigma_global};

    std::vector<double> scratch;
    std::array<Plane, 3> yhat = ycc.planes;
    for (int k = 1; k <= p.iterations; ++k) {
        std::array<Plane, 3> y_k;
        for (int c = 0; c < 3; ++c)
            y_k[c] = (k == 1) ? ycc.planes[c] : blend_planes(yhat[c], ycc.planes[c], p.lambda);
        std::array<double, 3> sig = sigmas;
        if (p.reestimate_sigma_per_iter && !p.sigma_override && k > 1) {
            ColorImage tmp;
            tmp.space = ColorSpace::YCbCr;
            tmp.planes = y_k;
            const auto es = nlh::reference::estimate_color(tmp, p);
            for (int c = 0; c < 3; ++c) sig[c] = es[c].sigma_global;
        }
        std::array<Accumulator, 3> acc{Accumulator(ycc.height(), ycc.width()),
                                       Accumulator(ycc.height(), ycc.width()),
                                       Accumulator(ycc.height(), ycc.width())};
        for (const Coord& ref :
             reference_grid(ycc.height(), ycc.width(), p.patch_side, p.stride)) {
            const PatchStack stack =
                search_similar_patches(y_k[0], ref, p.patch_side, p.window, p.m1);
            const auto dist = all_row_distances(stack);
            for (int c = 0; c < 3; ++c) {
                RefSums sums(stack.n, p.m1);
                for (int i = 0; i < stack.n; ++i) {
                    const auto idx = nearest_rows(dist, stack.n, i, p.q1);
                    Mat g = gather(y_k[c], stack.coords, p.patch_side, idx, p.m1);
                    haar_forward_2d(g);
                    bi_hard_threshold(g, sig[c], p.tau, p.threshold_law);
                    haar_inverse_cols(g.data.data(), g.rows, g.cols, scratch);
                    sums.add(idx, g);
                }
                sums.flush(acc[c], stack.coords, p.patch_side);
            }
        }
        for (int c = 0; c < 3; ++c) yhat[c] = finalize(acc[c]);
    }

    ColorImage basic_ycc;
    basic_ycc.space = ColorSpace::YCbCr;
    basic_ycc.planes = yhat;

    std::array<Accumulator, 3> acc{Accumulator(ycc.height(), ycc.width()),
                                   Accumulator(ycc.height(), ycc.width()),
                                   Accumulator(ycc.height(), ycc.width())};
    for (const Coord& ref : reference_grid(ycc.height(), ycc.width(), p.patch_side, p.stride)) {
        const PatchStack stack =
            search_similar_patches(basic_ycc.planes[0], ref, p.patch_side, p.window, p.m2);
        const auto dist = all_row_distances(stack);
        for (int c = 0; c < 3; ++c) {
            RefSums sums(stack.n, p.m2);
            for (int i = 0; i < stack.n; ++i) {
                const auto idx = nearest_rows(dist, stack.n, i, p.q2);
                Mat guide = gather(basic_ycc.planes[c], stack.coords, p.patch_side, idx, p.m2);
                Mat noisy = gather(ycc.planes[c], stack.coords, p.patch_side, idx, p.m2);
                haar_forward_2d(guide);
                haar_forward_2d(noisy);
                wiener_shrink(noisy, guide, sigmas[c]);
                haar_inverse_cols(noisy.data.data(), noisy.rows, noisy.cols, scratch);
                sums.add(idx, noisy);
            }
            sums.flush(acc[c], stack.coords, p.patch_side);
        }
    }
    ColorImage out_ycc;
    out_ycc.space = ColorSpace::YCbCr;
    for (int c = 0; c < 3; ++c) out_ycc.planes[c] = finalize(acc[c]);

    res.basic = ycbcr_to_rgb(basic_ycc);
    res.output = ycbcr_to_rgb(out_ycc);
    return res;
}

}  // namespace nlh::reference
