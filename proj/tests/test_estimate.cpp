#include <doctest.h>

#include <cmath>
#include <random>

#include "nlh/estimate.hpp"
#include "nlh/noise.hpp"
#include "search_oracles.hpp"
#include "test_util.hpp"

using namespace nlh;

namespace {

// Literal triple-loop evaluation: mean over rows and non-self neighbors of
// sqrt(d^2/m), with its own selection over the row-candidate window.
double sigma_local_oracle(const PatchStack& stack, int q, int radius) {
    double acc = 0.0;
    for (int i = 0; i < stack.n; ++i) {
        std::vector<std::pair<double, int>> cand;
        const int lo = radius > 0 ? std::max(0, i - radius) : 0;
        const int hi = radius > 0 ? std::min(stack.n - 1, i + radius) : stack.n - 1;
        for (int j = lo; j <= hi; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (int k = 0; k < stack.m; ++k) {
                const double d = stack.at(i, k) - stack.at(j, k);
                d2 += d * d;
            }
            cand.emplace_back(d2, j);
        }
        std::sort(cand.begin(), cand.end());
        for (int t = 0; t < q - 1 && t < static_cast<int>(cand.size()); ++t)
            acc += std::sqrt(cand[t].first / stack.m);
    }
    return acc / (static_cast<double>(stack.n) * (q - 1));
}

PatchStack random_stack(int n, int m, uint32_t seed) {
    PatchStack s;
    s.n = n;
    s.m = m;
    s.side = 1;
    s.data.resize(static_cast<size_t>(n) * m);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& v : s.data) v = uni(rng);
    s.coords.assign(m, {0, 0});
    s.distances.assign(m, 0.0);
    return s;
}

}  // namespace

TEST_CASE("sigma_local: identical rows give zero") {
    PatchStack s = random_stack(8, 4, 2);
    for (int i = 1; i < s.n; ++i)
        for (int k = 0; k < s.m; ++k) s.data[static_cast<size_t>(i) * s.m + k] = s.at(0, k);
    CHECK(sigma_local(s, 4) == 0.0);
}

TEST_CASE("sigma_local: two-row hand case evaluates to 2") {
    PatchStack s;
    s.n = 2;
    s.m = 4;
    s.side = 1;
    s.data = {0, 0, 0, 0, 2, 2, 2, 2};
    s.coords = {{0, 0}, {0, 1}, {0, 2}, {0, 3}};
    s.distances = {0, 0, 0, 0};
    // each row's only neighbor is at distance 4; 4/sqrt(4) = 2
    CHECK(sigma_local(s, 2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(sigma_local(s, 1), std::invalid_argument);
}

TEST_CASE("sigma_local matches the triple-loop oracle") {
    for (uint32_t seed : {5u, 6u, 7u, 8u}) {
        const PatchStack s = random_stack(25, 16, seed);
        for (int radius : {0, 4, 10})
            CHECK(sigma_local(s, 4, radius) ==
                  doctest::Approx(sigma_local_oracle(s, 4, radius)).epsilon(1e-12));
    }
}

TEST_CASE("sigma_local is homogeneous of degree 1") {
    PatchStack s = random_stack(16, 8, 11);
    const double base = sigma_local(s, 4);
    for (auto& v : s.data) v *= 3.5;
    CHECK(sigma_local(s, 4) == doctest::Approx(3.5 * base).epsilon(1e-12));
}

TEST_CASE("sigma_global: constant image estimates exactly zero") {
    NlhParams p = profile_params(Profile::AwgnLow);
    const Plane img(48, 48, 0.6);
    const NoiseEstimate est = sigma_global(img, p, 1);
    CHECK(est.sigma_global == 0.0);
    for (double v : est.sigma_locals) CHECK(v == 0.0);
    // the global value is the mean of the locals by construction
    CHECK(est.sigma_locals.size() == reference_grid(48, 48, 8, 4).size());
}

TEST_CASE("sigma_global is monotone in the injected noise level") {
    NlhParams p = profile_params(Profile::AwgnLow);
    const Plane clean = crop(testutil::load_gray("camera.pgm"), 128, 128, 128, 128);
    double prev = -1.0;
    for (double sigma : {5.0, 15.0, 25.0, 50.0}) {
        const Plane noisy = add_awgn(clean, sigma, 1);
        const double est = sigma_global(noisy, p, 0).global_255();
        CAPTURE(sigma);
        CHECK(est > prev);
        prev = est;
    }
}

TEST_CASE("low-sigma bias stays inside the documented window") {
    // At sigma 5 the estimate rides on the content floor, so the absolute
    // value is image-dependent; the documented [5, 7.5] window holds on
    // smooth natural images (moon here), and the no-underestimation side
    // holds for the whole suite mean.
    NlhParams p = profile_params(Profile::AwgnLow);
    const Plane moon = testutil::load_gray("moon.pgm");
    const double est = sigma_global(add_awgn(moon, 5.0, 4), p, 0).global_255();
    CHECK(est >= 5.0);
    CHECK(est <= 7.5);

    double mean = est;
    int count = 1;
    for (const char* name : {"camera.pgm", "coins.pgm", "astronaut_gray.pgm"}) {
        mean += sigma_global(add_awgn(testutil::load_gray(name), 5.0, 4 + count), p, 0)
                    .global_255();
        ++count;
    }
    CHECK(mean / count >= 5.0);
}

TEST_CASE("sigma_global is deterministic across worker counts") {
    NlhParams p = profile_params(Profile::AwgnLow);
    const Plane noisy = add_awgn(crop(testutil::load_gray("moon.pgm"), 0, 0, 96, 96), 25.0, 9);
    const NoiseEstimate a = sigma_global(noisy, p, 1);
    const NoiseEstimate b = sigma_global(noisy, p, 4);
    CHECK(a.sigma_global == b.sigma_global);
    CHECK(a.sigma_locals == b.sigma_locals);
}

TEST_CASE("residual histogram: identical images mass at the zero bin") {
    NlhParams p = profile_params(Profile::Real);
    const Plane img = crop(testutil::load_gray("coins.pgm"), 0, 0, 64, 64);
    const ResidualHistogram h = residual_histogram(img, img, p);
    int64_t total = 0;
    for (int b = 0; b < ResidualHistogram::kBins; ++b) total += h.counts[b];
    CHECK(total > 0);
    CHECK(h.counts[ResidualHistogram::kZeroBin] == total);
}

TEST_CASE("residual histogram: AWGN moments survive the grouping") {
    NlhParams p = profile_params(Profile::Real);
    const Plane clean = crop(testutil::load_gray("camera.pgm"), 32, 32, 128, 128);
    const Plane noisy = add_awgn(clean, 5.0, 17);
    const ResidualHistogram h = residual_histogram(noisy, clean, p);

    // moments from the histogram (bin centers)
    double n = 0, mean = 0;
    for (int b = 0; b < ResidualHistogram::kBins; ++b) {
        const double x = ResidualHistogram::kLo + (b + 0.5) * ResidualHistogram::kBinWidth;
        n += static_cast<double>(h.counts[b]);
        mean += static_cast<double>(h.counts[b]) * x;
    }
    mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (int b = 0; b < ResidualHistogram::kBins; ++b) {
        const double x =
            ResidualHistogram::kLo + (b + 0.5) * ResidualHistogram::kBinWidth - mean;
        const double c = static_cast<double>(h.counts[b]);
        m2 += c * x * x;
        m3 += c * x * x * x;
        m4 += c * x * x * x * x;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double sd = std::sqrt(m2);
    const double skew = m3 / (m2 * sd);
    const double kurt = m4 / (m2 * m2) - 3.0;

    CHECK(n >= 1e5);  // enough samples for the moment bounds
    CHECK(sd == doctest::Approx(5.0 / 255.0).epsilon(0.05));
    CHECK(std::fabs(skew) < 0.1);
    CHECK(std::fabs(kurt) < 0.2);
}

TEST_CASE("residual histogram rejects mismatched shapes") {
    NlhParams p = profile_params(Profile::Real);
    CHECK_THROWS_AS(residual_histogram(Plane(32, 32), Plane(32, 33), p), std::invalid_argument);
}
