#include <doctest.h>

#include <cmath>

#include "nlh/noise.hpp"
#include "test_util.hpp"

using namespace nlh;

TEST_CASE("sigma 0 returns the input unchanged") {
    const Plane img = testutil::random_plane(16, 16, 9);
    CHECK(testutil::bitwise_equal(img, add_awgn(img, 0.0, 123)));
}

TEST_CASE("negative sigma is rejected") {
    CHECK_THROWS_AS(add_awgn(Plane(4, 4), -1.0, 0), std::invalid_argument);
}

TEST_CASE("residual moments match the requested noise level") {
    const Plane img = testutil::random_plane(512, 512, 42);
    const Plane noisy = add_awgn(img, 25.0, 7);

    double mean = 0.0;
    for (size_t i = 0; i < img.size(); ++i) mean += noisy.data[i] - img.data[i];
    mean /= static_cast<double>(img.size());

    double var = 0.0;
    for (size_t i = 0; i < img.size(); ++i) {
        const double d = noisy.data[i] - img.data[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(img.size() - 1);

    const double target = 25.0 / 255.0;
    CHECK(std::fabs(mean) < 1e-3);
    CHECK(std::sqrt(var) == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("fixed seed gives a bitwise-identical stream") {
    const Plane img = testutil::random_plane(64, 48, 5);
    const Plane a = add_awgn(img, 25.0, 999);
    const Plane b = add_awgn(img, 25.0, 999);
    CHECK(testutil::bitwise_equal(a, b));
    const Plane c = add_awgn(img, 25.0, 1000);
    CHECK_FALSE(testutil::bitwise_equal(a, c));
}
