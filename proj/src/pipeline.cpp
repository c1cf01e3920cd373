#include "nlh/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include "nlh/color.hpp"
#include "nlh/haar.hpp"
#include "nlh/parallel.hpp"

namespace nlh {

namespace {

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// q nearest row indices (reference first, then ascending distance, ties by
// smaller index) from a squared-distance matrix.
void select_row_indices(const std::vector<double>& d2, int n, int ref_row, int q, int* idx_out,
                        std::vector<std::pair<double, int>>& scratch) {
    scratch.clear();
    const double* row = &d2[static_cast<size_t>(ref_row) * n];
    for (int j = 0; j < n; ++j)
        if (j != ref_row) scratch.emplace_back(row[j], j);
    std::partial_sort(scratch.begin(), scratch.begin() + (q - 1), scratch.end());
    idx_out[0] = ref_row;
    for (int t = 1; t < q; ++t) idx_out[t] = scratch[t - 1].second;
}

// Per-reference aggregation: group rows are accumulated in the
// row-coefficient domain (the inverse row transform is linear, so it can run
// once on the per-reference sums instead of once per group), then one
// scattered pass lands the sums in the image accumulator. Every group of a
// reference writes into the same m patches.
struct LocalAccumulator {
    std::vector<double> sum, count;

    void reset(int n, int m) {
        sum.assign(static_cast<size_t>(n) * m, 0.0);
        count.assign(static_cast<size_t>(n) * m, 0.0);
    }
    void add_group(const int* idx, int q, int m, const double* values) {
        for (int t = 0; t < q; ++t) {
            double* s = &sum[static_cast<size_t>(idx[t]) * m];
            double* k = &count[static_cast<size_t>(idx[t]) * m];
            const double* src = values + static_cast<size_t>(t) * m;
            for (int j = 0; j < m; ++j) {
                s[j] += src[j];
                k[j] += 1.0;
            }
        }
    }
    void flush(Accumulator& acc, const std::vector<Coord>& coords, int side, int n, int m,
               std::vector<double>& scratch) {
        haar_inverse_rows(sum.data(), n, m, scratch);
        for (int p = 0; p < n; ++p) {
            const int rl = p % side;
            const int cl = p / side;
            const double* s = &sum[static_cast<size_t>(p) * m];
            const double* k = &count[static_cast<size_t>(p) * m];
            for (int j = 0; j < m; ++j) {
                if (k[j] == 0.0) continue;
                const int r = coords[j].row + rl;
                const int c = coords[j].col + cl;
                acc.sum.at(r, c) += s[j];
                acc.weight.at(r, c) += k[j];
            }
        }
    }
};

struct PassSlot {
    PatchStack stack;
    detail::SearchScratch search;
    std::vector<double> d2;
    std::vector<std::pair<double, int>> rows;
    std::vector<int> indices;    // n*q row indices
    std::vector<double> values;  // C*n*q*m denoised group values, channel-major
    PatchStack cstack;           // per-channel stack, row-transformed in place
    PatchStack cstack2;          // second stream for stage 2
    std::vector<double> guide;   // q*m scratch for stage 2
    std::vector<double> scratch;
    double search_seconds = 0.0;
};

// Copies the q selected (already row-transformed) stack rows into a group.
void assemble_rows(const PatchStack& stack, const int* idx, int q, double* out) {
    for (int t = 0; t < q; ++t)
        std::memcpy(out + static_cast<size_t>(t) * stack.m,
                    &stack.data[static_cast<size_t>(idx[t]) * stack.m],
                    static_cast<size_t>(stack.m) * sizeof(double));
}

// Shared body of both stages: one matching pass over `search_img`, group
// filtering per channel, ordered scatter. `body` fills slot.values for all
// channels and row groups. The per-row transforms of stack rows are shared
// across the groups they appear in, which changes no bits: the same
// butterflies run on the same rows either way.
template <typename Body>
std::vector<Plane> run_pass(const Plane& search_img, int n_channels, int q, int m,
                            const NlhParams& p, int workers, double* search_seconds,
                            Body&& body) {
    const auto refs =
        reference_grid(search_img.height, search_img.width, p.patch_side, p.stride);
    const int side = p.patch_side;
    const int n = p.patch_pixels();

    std::vector<Accumulator> acc;
    acc.reserve(n_channels);
    for (int c = 0; c < n_channels; ++c) acc.emplace_back(search_img.height, search_img.width);

    double search_acc = 0.0;
    LocalAccumulator local;
    std::vector<double> flush_scratch;
    parallel_for_ordered<PassSlot>(
        static_cast<int>(refs.size()), workers,
        [&](int i, PassSlot& s) {
            const auto t0 = Clock::now();
            detail::search_similar_patches_into(search_img, refs[i], side, p.window, m, s.stack,
                                                s.search);
            s.search_seconds = secs_since(t0);
            detail::row_distance_matrix(s.stack, s.d2);
            s.indices.resize(static_cast<size_t>(n) * q);
            s.values.resize(static_cast<size_t>(n_channels) * n * q * m);
            for (int r = 0; r < n; ++r)
                select_row_indices(s.d2, n, r, q, &s.indices[static_cast<size_t>(r) * q], s.rows);
            body(s);
        },
        [&](int /*i*/, PassSlot& s) {
            search_acc += s.search_seconds;
            for (int c = 0; c < n_channels; ++c) {
                local.reset(n, m);
                for (int r = 0; r < n; ++r)
                    local.add_group(&s.indices[static_cast<size_t>(r) * q], q, m,
                                    &s.values[(static_cast<size_t>(c) * n + r) * q * m]);
                local.flush(acc[c], s.stack.coords, side, n, m, flush_scratch);
            }
        });
    if (search_seconds) *search_seconds += search_acc;

    std::vector<Plane> out;
    out.reserve(n_channels);
    for (int c = 0; c < n_channels; ++c) out.push_back(finalize(acc[c]));
    return out;
}

std::vector<Plane> stage1_pass_multi(const Plane& search_img,
                                     const std::vector<const Plane*>& channels,
                                     const std::vector<double>& sigmas, const NlhParams& p,
                                     int workers, double* search_seconds) {
    const int n = p.patch_pixels();
    const int q = p.q1, m = p.m1;
    return run_pass(
        search_img, static_cast<int>(channels.size()), q, m, p, workers, search_seconds,
        [&, n, q, m](PassSlot& s) {
            for (int c = 0; c < static_cast<int>(channels.size()); ++c) {
                detail::gather_stack_channel(*channels[c], s.stack, s.cstack);
                haar_forward_rows(s.cstack.data.data(), n, m, s.scratch);
                for (int r = 0; r < n; ++r) {
                    double* g = &s.values[(static_cast<size_t>(c) * n + r) * q * m];
                    assemble_rows(s.cstack, &s.indices[static_cast<size_t>(r) * q], q, g);
                    haar_forward_cols(g, q, m, s.scratch);
                    bi_hard_threshold(g, q, m, sigmas[c], p.tau, p.threshold_law);
                    haar_inverse_cols(g, q, m, s.scratch);
                }
            }
        });
}

std::vector<Plane> stage2_pass_multi(const Plane& search_img,
                                     const std::vector<const Plane*>& guide_channels,
                                     const std::vector<const Plane*>& noisy_channels,
                                     const std::vector<double>& sigmas, const NlhParams& p,
                                     int workers, double* search_seconds) {
    const int n = p.patch_pixels();
    const int q = p.q2, m = p.m2;
    return run_pass(
        search_img, static_cast<int>(guide_channels.size()), q, m, p, workers, search_seconds,
        [&, n, q, m](PassSlot& s) {
            s.guide.resize(static_cast<size_t>(q) * m);
            for (int c = 0; c < static_cast<int>(guide_channels.size()); ++c) {
                detail::gather_stack_channel(*guide_channels[c], s.stack, s.cstack);
                detail::gather_stack_channel(*noisy_channels[c], s.stack, s.cstack2);
                haar_forward_rows(s.cstack.data.data(), n, m, s.scratch);
                haar_forward_rows(s.cstack2.data.data(), n, m, s.scratch);
                for (int r = 0; r < n; ++r) {
                    const int* idx = &s.indices[static_cast<size_t>(r) * q];
                    double* g = &s.values[(static_cast<size_t>(c) * n + r) * q * m];
                    assemble_rows(s.cstack, idx, q, s.guide.data());
                    assemble_rows(s.cstack2, idx, q, g);
                    haar_forward_cols(s.guide.data(), q, m, s.scratch);
                    haar_forward_cols(g, q, m, s.scratch);
                    wiener_shrink(g, s.guide.data(), q, m, sigmas[c]);
                    haar_inverse_cols(g, q, m, s.scratch);
                }
            }
        });
}

NoiseEstimate override_estimate(double sigma255) {
    NoiseEstimate est;
    est.sigma_global = sigma255 / 255.0;
    return est;
}

}  // namespace

Plane blend_planes(const Plane& prev, const Plane& orig, double lambda) {
    if (!prev.same_shape(orig)) throw std::invalid_argument("blend_planes: shape mismatch");
    Plane out(prev.height, prev.width);
    for (size_t i = 0; i < out.size(); ++i)
        out.data[i] = lambda * prev.data[i] + (1.0 - lambda) * orig.data[i];
    return out;
}

Plane stage1_pass(const Plane& y_k, double sigma_g, const NlhParams& params, int workers,
                  double* search_seconds) {
    validate_params(params, y_k.height, y_k.width);
    auto out = stage1_pass_multi(y_k, {&y_k}, {sigma_g}, params, workers, search_seconds);
    return std::move(out[0]);
}

std::pair<Plane, NoiseEstimate> stage1(const Plane& y, const NlhParams& params, int workers,
                                       PhaseTimings* timings) {
    validate_params(params, y.height, y.width);

    NoiseEstimate est;
    if (params.sigma_override) {
        est = override_estimate(*params.sigma_override);
    } else {
        const auto t0 = Clock::now();
        est = sigma_global(y, params, workers);
        if (timings) timings->estimate_s += secs_since(t0);
    }

    Plane yhat = y;
    for (int k = 1; k <= params.iterations; ++k) {
        // feedback blend; the first iteration is the identity mix, so the
        // raw input is used directly
        const Plane y_k = (k == 1) ? y : blend_planes(yhat, y, params.lambda);
        double sig = est.sigma_global;
        if (params.reestimate_sigma_per_iter && !params.sigma_override && k > 1) {
            const auto t0 = Clock::now();
            sig = sigma_global(y_k, params, workers).sigma_global;
            if (timings) timings->estimate_s += secs_since(t0);
        }
        const auto t1 = Clock::now();
        yhat = stage1_pass(y_k, sig, params, workers, timings ? &timings->search_s : nullptr);
        if (timings) timings->stage1_s += secs_since(t1);
    }
    return {std::move(yhat), std::move(est)};
}

Plane stage2(const Plane& y, const Plane& basic, double sigma_g, const NlhParams& params,
             int workers, double* search_seconds) {
    if (!y.same_shape(basic)) throw std::invalid_argument("stage2: dimension mismatch");
    validate_params(params, y.height, y.width);
    auto out = stage2_pass_multi(basic, {&basic}, {&y}, {sigma_g}, params, workers, search_seconds);
    return std::move(out[0]);
}

GrayDenoiseResult denoise_gray(const Plane& y, const NlhParams& params, int workers) {
    const auto t0 = Clock::now();
    GrayDenoiseResult res;
    auto [basic, est] = stage1(y, params, workers, &res.timings);
    res.basic = std::move(basic);
    res.sigma = std::move(est);

    const auto t1 = Clock::now();
    res.output =
        stage2(y, res.basic, res.sigma.sigma_global, params, workers, &res.timings.search_s);
    res.timings.stage2_s = secs_since(t1);
    res.timings.total_s = secs_since(t0);
    return res;
}

std::array<NoiseEstimate, 3> estimate_color(const ColorImage& ycbcr, const NlhParams& params,
                                            int workers) {
    if (ycbcr.space != ColorSpace::YCbCr)
        throw std::invalid_argument("estimate_color: image must be YCbCr");
    const Plane& luma = ycbcr.planes[0];
    validate_params(params, luma.height, luma.width);
    const auto refs = reference_grid(luma.height, luma.width, params.patch_side, params.stride);

    std::array<NoiseEstimate, 3> est;
    for (auto& e : est) e.sigma_locals.assign(refs.size(), 0.0);

    struct Slot {
        PatchStack ystack, cstack;
        detail::SearchScratch search;
        std::vector<double> d2;
        std::vector<std::pair<double, int>> rows;
        std::array<double, 3> sigma{};
    };
    parallel_for_ordered<Slot>(
        static_cast<int>(refs.size()), workers,
        [&](int i, Slot& s) {
            detail::search_similar_patches_into(luma, refs[i], params.patch_side, params.window,
                                                params.m1, s.ystack, s.search);
            for (int c = 0; c < 3; ++c) {
                detail::gather_stack_channel(ycbcr.planes[c], s.ystack, s.cstack);
                detail::row_distance_matrix(s.cstack, s.d2);
                s.sigma[c] = detail::sigma_local_from_d2(s.cstack, s.d2, params.q1,
                                                         params.sigma_row_radius, s.rows);
            }
        },
        [&](int i, Slot& s) {
            for (int c = 0; c < 3; ++c) est[c].sigma_locals[i] = s.sigma[c];
        });

    for (auto& e : est) {
        double acc = 0.0;
        for (double v : e.sigma_locals) acc += v;
        e.sigma_global = refs.empty() ? 0.0 : acc / static_cast<double>(refs.size());
    }
    return est;
}

ColorDenoiseResult denoise_color(const ColorImage& rgb, const NlhParams& params, int workers) {
    if (rgb.space != ColorSpace::RGB)
        throw std::invalid_argument("denoise_color: image must be RGB");
    for (int c = 1; c < 3; ++c)
        if (!rgb.planes[c].same_shape(rgb.planes[0]))
            throw std::invalid_argument("denoise_color: plane shapes differ");

    const auto t0 = Clock::now();
    ColorDenoiseResult res;
    const ColorImage ycc = rgb_to_ycbcr(rgb);
    validate_params(params, ycc.height(), ycc.width());

    if (params.sigma_override) {
        for (auto& e : res.sigma) e = override_estimate(*params.sigma_override);
    } else {
        const auto te = Clock::now();
        res.sigma = estimate_color(ycc, params, workers);
        res.timings.estimate_s += secs_since(te);
    }
    std::vector<double> sigmas = {res.sigma[0].sigma_global, res.sigma[1].sigma_global,
                                  res.sigma[2].sigma_global};

    // stage 1 with feedback, matching on the evolving Y channel
    std::array<Plane, 3> yhat = ycc.planes;
    for (int k = 1; k <= params.iterations; ++k) {
        std::array<Plane, 3> y_k;
        for (int c = 0; c < 3; ++c)
            y_k[c] = (k == 1) ? ycc.planes[c] : blend_planes(yhat[c], ycc.planes[c], params.lambda);
        std::vector<double> sig = sigmas;
        if (params.reestimate_sigma_per_iter && !params.sigma_override && k > 1) {
            const auto te = Clock::now();
            ColorImage tmp;
            tmp.space = ColorSpace::YCbCr;
            tmp.planes = y_k;
            const auto es = estimate_color(tmp, params, workers);
            for (int c = 0; c < 3; ++c) sig[c] = es[c].sigma_global;
            res.timings.estimate_s += secs_since(te);
        }
        const auto t1 = Clock::now();
        auto planes = stage1_pass_multi(y_k[0], {&y_k[0], &y_k[1], &y_k[2]}, sig, params, workers,
                                        &res.timings.search_s);
        for (int c = 0; c < 3; ++c) yhat[c] = std::move(planes[c]);
        res.timings.stage1_s += secs_since(t1);
    }

    ColorImage basic_ycc;
    basic_ycc.space = ColorSpace::YCbCr;
    basic_ycc.planes = yhat;

    // stage 2: matching on the basic Y estimate, Wiener on the noisy groups
    const auto t2 = Clock::now();
    auto finals = stage2_pass_multi(
        basic_ycc.planes[0], {&basic_ycc.planes[0], &basic_ycc.planes[1], &basic_ycc.planes[2]},
        {&ycc.planes[0], &ycc.planes[1], &ycc.planes[2]}, sigmas, params, workers,
        &res.timings.search_s);
    res.timings.stage2_s = secs_since(t2);

    ColorImage out_ycc;
    out_ycc.space = ColorSpace::YCbCr;
    for (int c = 0; c < 3; ++c) out_ycc.planes[c] = std::move(finals[c]);

    res.basic = ycbcr_to_rgb(basic_ycc);
    res.output = ycbcr_to_rgb(out_ycc);
    res.timings.total_s = secs_since(t0);
    return res;
}

namespace detail {

void gather_stack_channel(const Plane& plane, const PatchStack& geometry, PatchStack& out) {
    out.n = geometry.n;
    out.m = geometry.m;
    out.side = geometry.side;
    out.coords = geometry.coords;
    out.distances = geometry.distances;
    out.data.resize(static_cast<size_t>(out.n) * out.m);
    for (int j = 0; j < out.m; ++j) {
        const Coord pc = out.coords[j];
        for (int cl = 0; cl < out.side; ++cl)
            for (int rl = 0; rl < out.side; ++rl)
                out.data[static_cast<size_t>(cl * out.side + rl) * out.m + j] =
                    plane.at(pc.row + rl, pc.col + cl);
    }
}

}  // namespace detail

}  // namespace nlh
