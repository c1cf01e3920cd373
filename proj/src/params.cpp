#include "nlh/params.hpp"

#include <algorithm>
#include <tuple>

namespace nlh {

NlhParams profile_params(Profile p) {
    NlhParams out;  // base: W=40, m1=16, q1=4, tau=2, lambda=0.6, m2=64, q2=8
    switch (p) {
        case Profile::AwgnLow:
            out.patch_side = 8;
            out.iterations = 4;
            out.stride = 4;
            break;
        case Profile::AwgnHigh:
            out.patch_side = 10;
            out.iterations = 5;
            out.stride = 4;
            break;
        case Profile::Real:
        case Profile::Custom:
            out.patch_side = 7;
            out.iterations = 2;
            out.stride = 3;
            break;
    }
    return out;
}

Profile profile_from_name(const std::string& name) {
    if (name == "awgn-low") return Profile::AwgnLow;
    if (name == "awgn-high") return Profile::AwgnHigh;
    if (name == "real") return Profile::Real;
    if (name == "custom") return Profile::Custom;
    throw std::invalid_argument("unknown profile: " + name);
}

std::string profile_name(Profile p) {
    switch (p) {
        case Profile::AwgnLow: return "awgn-low";
        case Profile::AwgnHigh: return "awgn-high";
        case Profile::Real: return "real";
        case Profile::Custom: return "custom";
    }
    return "?";
}

namespace {
// Candidate count of the most truncated (corner) window: rows in
// [ref - W/2, ref - W/2 + W - 1] clamped to [0, limit].
int corner_candidates(int window, int limit) {
    const int lo = std::max(0, 0 - window / 2);
    const int hi = std::min(limit, 0 - window / 2 + window - 1);
    const int at0 = hi - lo + 1;
    const int lo2 = std::max(0, limit - window / 2);
    const int hi2 = std::min(limit, limit - window / 2 + window - 1);
    const int atEnd = hi2 - lo2 + 1;
    return std::min(at0, atEnd);
}
}  // namespace

void validate_params(const NlhParams& p, int height, int width) {
    if (p.patch_side < 1) throw std::invalid_argument("patch_side must be >= 1");
    if (p.patch_side > std::min(height, width))
        throw std::invalid_argument("image smaller than patch");
    if (p.stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (p.window < 1) throw std::invalid_argument("window must be >= 1");
    if (p.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (p.lambda < 0.0 || p.lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");
    if (p.tau < 0.0) throw std::invalid_argument("tau must be >= 0");
    if (p.sigma_override && *p.sigma_override < 0.0)
        throw std::invalid_argument("sigma override must be >= 0");

    const int n = p.patch_pixels();
    for (auto [q, m, tag] : {std::tuple{p.q1, p.m1, "stage 1"}, std::tuple{p.q2, p.m2, "stage 2"}}) {
        if (!is_power_of_two(q) || !is_power_of_two(m))
            throw std::invalid_argument(std::string(tag) + ": q and m must be powers of 2");
        if (q > n) throw std::invalid_argument(std::string(tag) + ": q exceeds patch pixel count");
        if (m < 1) throw std::invalid_argument(std::string(tag) + ": m must be >= 1");
    }

    const int cand = corner_candidates(p.window, height - p.patch_side) *
                     corner_candidates(p.window, width - p.patch_side);
    if (cand < std::max(p.m1, p.m2))
        throw std::invalid_argument(
            "search window too small: fewer candidates than requested similar patches");
}

}  // namespace nlh
