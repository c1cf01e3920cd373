#include <doctest.h>

#include <cmath>
#include <random>

#include "haar_oracles.hpp"
#include "nlh/haar.hpp"

using namespace nlh;

namespace {
Mat random_mat(int q, int m, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Mat out(q, m);
    for (auto& v : out.data) v = uni(rng);
    return out;
}

double frobenius(const Mat& m) {
    double acc = 0.0;
    for (double v : m.data) acc += v * v;
    return std::sqrt(acc);
}
}  // namespace

TEST_CASE("hand-evaluated forward examples") {
    const auto dc = haar_forward_1d({1, 1, 1, 1});
    CHECK(dc[0] == doctest::Approx(2.0).epsilon(1e-12));
    for (int i = 1; i < 4; ++i) CHECK(dc[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    const auto ab = haar_forward_1d({0.3, 0.9});
    CHECK(ab[0] == doctest::Approx((0.3 + 0.9) / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(ab[1] == doctest::Approx((0.3 - 0.9) / std::sqrt(2.0)).epsilon(1e-15));

    const auto c = haar_forward_1d({1, 2, 3, 4});
    CHECK(c[0] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(c[2] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(c[3] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("hand-evaluated inverse examples") {
    const auto ones = haar_inverse_1d({2, 0, 0, 0});
    for (double v : ones) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(haar_forward_1d(std::vector<double>(3)), std::invalid_argument);
    CHECK_THROWS_AS(haar_inverse_1d(std::vector<double>(12)), std::invalid_argument);
}

TEST_CASE("forward matches the explicit matrix oracle") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int len : {2, 4, 8, 16, 32, 64}) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> v(len);
            for (auto& x : v) x = uni(rng);
            const auto got = haar_forward_1d(v);
            const auto want = haar_oracle::forward_by_matrix(v);
            for (int i = 0; i < len; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
            const auto back = haar_inverse_1d(got);
            for (int i = 0; i < len; ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("1d round trip and norm preservation") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int len : {2, 4, 8, 16, 32, 64}) {
        std::vector<double> v(len);
        for (auto& x : v) x = uni(rng);
        const auto c = haar_forward_1d(v);
        double n0 = 0, n1 = 0;
        for (int i = 0; i < len; ++i) {
            n0 += v[i] * v[i];
            n1 += c[i] * c[i];
        }
        CHECK(std::sqrt(n0) == doctest::Approx(std::sqrt(n1)).epsilon(1e-12));
        const auto back = haar_inverse_1d(c);
        for (int i = 0; i < len; ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
    }
}

TEST_CASE("inverse of length 16 agrees with the sixteen explicit formulas") {
    for (uint32_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Mat coeff = random_mat(4, 16, seed);
        // inverse row transform of each row == oracle's horizontal inverse
        Mat got = coeff;
        std::vector<double> scratch(16);
        for (int r = 0; r < 4; ++r)
            haar_inverse_1d(&got.data[static_cast<size_t>(r) * 16], 16, scratch.data());
        const Mat want = haar_oracle::horizontal_inverse_4x16(coeff);
        for (size_t i = 0; i < got.data.size(); ++i)
            CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("2d transform: constant matrix concentrates in DC") {
    const double a = 0.371;
    Mat m(4, 16, a);
    haar_forward_2d(m);
    CHECK(m.at(0, 0) == doctest::Approx(8.0 * a).epsilon(1e-12));
    double off = 0.0;
    for (size_t i = 1; i < m.data.size(); ++i) off = std::max(off, std::fabs(m.data[i]));
    CHECK(off < 1e-12);
    haar_inverse_2d(m);
    for (double v : m.data) CHECK(v == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("2d transform equals the literal two-step appendix formulas") {
    for (uint32_t seed = 0; seed < 50; ++seed) {
        const Mat y = random_mat(4, 16, 1000 + seed);
        Mat got = y;
        haar_forward_2d(got);
        const Mat want = haar_oracle::forward_2d_4x16(y);
        for (size_t i = 0; i < got.data.size(); ++i)
            CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));

        Mat inv = want;
        haar_inverse_2d(inv);
        const Mat inv_want = haar_oracle::inverse_2d_4x16(want);
        for (size_t i = 0; i < inv.data.size(); ++i)
            CHECK(inv.data[i] == doctest::Approx(inv_want.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("2d round trip, norm preservation and linearity") {
    for (auto [q, m] : {std::pair{4, 16}, {8, 64}, {2, 8}}) {
        const Mat a = random_mat(q, m, 3 * q + m);
        Mat fwd = a;
        haar_forward_2d(fwd);
        CHECK(frobenius(fwd) == doctest::Approx(frobenius(a)).epsilon(1e-12));
        Mat back = fwd;
        haar_inverse_2d(back);
        for (size_t i = 0; i < a.data.size(); ++i)
            CHECK(back.data[i] == doctest::Approx(a.data[i]).epsilon(1e-12));
    }
    // linearity of the inverse
    const Mat c1 = random_mat(4, 16, 42), c2 = random_mat(4, 16, 43);
    const double alpha = 0.7, beta = -1.3;
    Mat mix(4, 16);
    for (size_t i = 0; i < mix.data.size(); ++i)
        mix.data[i] = alpha * c1.data[i] + beta * c2.data[i];
    Mat i1 = c1, i2 = c2;
    haar_inverse_2d(mix);
    haar_inverse_2d(i1);
    haar_inverse_2d(i2);
    for (size_t i = 0; i < mix.data.size(); ++i)
        CHECK(mix.data[i] ==
              doctest::Approx(alpha * i1.data[i] + beta * i2.data[i]).epsilon(1e-12));
}

TEST_CASE("bi-hard threshold: magnitude rule, band zeroing, column exemption") {
    Mat c(4, 16, 0.0);
    c.at(0, 3) = 0.015;
    c.at(1, 5) = 0.05;
    c.at(3, 2) = 0.05;  // last row, gets band-zeroed
    c.at(3, 0) = 0.05;  // last row, column 0 is exempt
    c.at(2, 7) = -0.021;
    bi_hard_threshold(c, 0.1, 2.0, ThresholdLaw::Sigma2);  // threshold 2*0.1^2 = 0.02
    CHECK(c.at(0, 3) == 0.0);
    CHECK(c.at(1, 5) == 0.05);
    CHECK(c.at(3, 2) == 0.0);
    CHECK(c.at(3, 0) == 0.05);
    CHECK(c.at(2, 7) == 0.0);  // row q-2 band

    // idempotence
    Mat again = c;
    bi_hard_threshold(again, 0.1, 2.0, ThresholdLaw::Sigma2);
    CHECK(again.data == c.data);

    // default law thresholds at tau * sigma
    Mat d(4, 16, 0.0);
    d.at(0, 1) = 0.15;
    d.at(1, 1) = 0.25;
    bi_hard_threshold(d, 0.1, 2.0);  // threshold 0.2
    CHECK(d.at(0, 1) == 0.0);
    CHECK(d.at(1, 1) == 0.25);
}

TEST_CASE("wiener shrink: limits and double application") {
    Mat noisy(2, 2, 0.0), guide(2, 2, 0.0);
    noisy.at(0, 0) = 1.0;
    guide.at(0, 0) = 0.0;  // zero guide kills the coefficient
    noisy.at(0, 1) = 0.8;
    guide.at(0, 1) = 0.05;  // guide == sigma/2 -> gain 1/2 applied twice
    noisy.at(1, 0) = -0.4;
    guide.at(1, 0) = 100.0;  // huge guide -> passthrough
    wiener_shrink(noisy, guide, 0.1);
    CHECK(noisy.at(0, 0) == 0.0);
    CHECK(noisy.at(0, 1) == doctest::Approx(0.8 / 4.0).epsilon(1e-12));
    CHECK(noisy.at(1, 0) == doctest::Approx(-0.4).epsilon(1e-6));

    // sigma 0 is exact passthrough, including zero guides
    Mat n2(2, 2, 0.7), g2(2, 2, 0.0);
    wiener_shrink(n2, g2, 0.0);
    for (double v : n2.data) CHECK(v == 0.7);

    // attenuation never amplifies
    Mat n3(4, 16), g3(4, 16);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& v : n3.data) v = uni(rng);
    for (auto& v : g3.data) v = uni(rng);
    Mat before = n3;
    wiener_shrink(n3, g3, 0.2);
    for (size_t i = 0; i < n3.data.size(); ++i)
        CHECK(std::fabs(n3.data[i]) <= std::fabs(before.data[i]) + 1e-15);
}
