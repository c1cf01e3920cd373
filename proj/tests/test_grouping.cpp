#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "nlh/grouping.hpp"
#include "search_oracles.hpp"
#include "test_util.hpp"

using namespace nlh;

TEST_CASE("reference grid covers the documented cases") {
    CHECK(reference_grid(8, 8, 8, 3) == std::vector<Coord>{{0, 0}});

    const auto g10 = reference_grid(10, 10, 8, 3);
    CHECK(g10 == std::vector<Coord>{{0, 0}, {0, 2}, {2, 0}, {2, 2}});

    // enumeration oracle for the 512/7/3 case: positions 0,3,...,504 plus the
    // clamped endpoint 505 -> 170 per axis
    std::set<int> axis;
    for (int p = 0; p + 7 <= 512; p += 3) axis.insert(p);
    axis.insert(512 - 7);
    const auto g512 = reference_grid(512, 512, 7, 3);
    CHECK(g512.size() == axis.size() * axis.size());
    CHECK(axis.size() == 170);

    CHECK_THROWS_AS(reference_grid(6, 6, 8, 3), std::invalid_argument);
}

TEST_CASE("reference grid covers every pixel") {
    for (auto [h, w, side, stride] : {std::tuple{37, 23, 7, 3}, {16, 16, 8, 5}, {64, 40, 10, 4}}) {
        Plane covered(h, w, 0.0);
        for (const Coord& rc : reference_grid(h, w, side, stride))
            for (int r = 0; r < side; ++r)
                for (int c = 0; c < side; ++c) covered.at(rc.row + r, rc.col + c) = 1.0;
        for (double v : covered.data) CHECK(v == 1.0);
    }
}

TEST_CASE("constant image matching is pure raster order") {
    const Plane img(20, 20, 0.25);
    const PatchStack s = search_similar_patches(img, {5, 5}, 4, 10, 8);
    CHECK(s.coords[0] == Coord{5, 5});  // reference always first
    CHECK(s.distances[0] == 0.0);
    for (double d : s.distances) CHECK(d == 0.0);
    // remaining candidates in raster order of the clamped window ([0..10]^2)
    CHECK(s.coords[1] == Coord{0, 0});
    CHECK(s.coords[2] == Coord{0, 1});
    CHECK(s.coords[3] == Coord{0, 2});
}

TEST_CASE("an exact duplicate is found at distance zero") {
    Plane img = testutil::random_plane(32, 32, 21);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) img.at(20 + r, 18 + c) = img.at(4 + r, 3 + c);
    const PatchStack s = search_similar_patches(img, {4, 3}, 4, 40, 4);
    CHECK(s.coords[0] == Coord{4, 3});
    CHECK(s.coords[1] == Coord{20, 18});
    CHECK(s.distances[1] == 0.0);
}

TEST_CASE("search equals the exhaustive oracle on random images") {
    std::mt19937 rng(999);
    for (int rep = 0; rep < 25; ++rep) {
        const int h = 24 + static_cast<int>(rng() % 41);
        const int w = 24 + static_cast<int>(rng() % 41);
        const int side = 4 + static_cast<int>(rng() % 5);
        const int window = 10 + static_cast<int>(rng() % 31);
        const int m = 1 << (rng() % 5);
        const Plane img = testutil::random_plane(h, w, 5000 + rep);
        const auto grid = reference_grid(h, w, side, std::max(3, h / 4));
        const Coord ref = grid[rng() % grid.size()];

        const auto want = search_oracle::top_patches(img, ref, side, window, m);
        if (static_cast<int>(want.size()) < m) continue;
        const PatchStack got = search_similar_patches(img, ref, side, window, m);
        for (int j = 0; j < m; ++j) {
            CHECK(got.coords[j].row == want[j].row);
            CHECK(got.coords[j].col == want[j].col);
            CHECK(got.distances[j] == doctest::Approx(std::sqrt(want[j].d2)).epsilon(1e-12));
        }
    }
}

TEST_CASE("row distances match a direct summation oracle") {
    const Plane img = testutil::random_plane(30, 30, 77);
    const PatchStack s = search_similar_patches(img, {10, 10}, 5, 16, 8);
    CHECK(row_distance(s, 3, 3) == 0.0);
    std::mt19937 rng(4);
    for (int rep = 0; rep < 30; ++rep) {
        const int i = rng() % s.n, j = rng() % s.n;
        double acc = 0.0;
        for (int k = 0; k < s.m; ++k) {
            const double d = s.at(i, k) - s.at(j, k);
            acc += d * d;
        }
        CHECK(row_distance(s, i, j) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(row_distance(s, 0, s.n), std::invalid_argument);
}

TEST_CASE("row distance hand case: constant rows distance 4") {
    PatchStack s;
    s.n = 2;
    s.m = 4;
    s.side = 1;
    s.data = {0, 0, 0, 0, 2, 2, 2, 2};
    s.coords = {{0, 0}, {0, 1}, {0, 2}, {0, 3}};
    s.distances = {0, 0, 0, 0};
    CHECK(row_distance(s, 0, 1) == doctest::Approx(4.0));
}

TEST_CASE("select_similar_rows ties and completeness") {
    const Plane img(16, 16, 0.5);
    const PatchStack s = search_similar_patches(img, {2, 2}, 4, 10, 8);
    // all rows identical: reference first, then the smallest indices
    const PixelRowGroup g = select_similar_rows(s, 5, 4);
    CHECK(g.row_indices == std::vector<int>{5, 0, 1, 2});
    CHECK(g.row_distances == std::vector<double>{0, 0, 0, 0});

    // q = n is a permutation with the reference first
    const PixelRowGroup full = select_similar_rows(s, 7, 16);
    std::set<int> seen(full.row_indices.begin(), full.row_indices.end());
    CHECK(seen.size() == 16);
    CHECK(full.row_indices[0] == 7);

    CHECK_THROWS_AS(select_similar_rows(s, 0, 32), std::invalid_argument);
}

TEST_CASE("select_similar_rows equals the full-sort oracle") {
    std::mt19937 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const Plane img = testutil::random_plane(40, 40, 900 + rep);
        const PatchStack s =
            search_similar_patches(img, {static_cast<int>(rng() % 30), 8}, 5, 20, 16);
        const int i = rng() % s.n;
        const int q = 4;
        const auto want = search_oracle::nearest_rows(s, i, q);
        const PixelRowGroup got = select_similar_rows(s, i, q);
        CHECK(got.row_indices == want);
        // group rows are copies of the stack rows
        for (int t = 0; t < q; ++t)
            for (int k = 0; k < s.m; ++k) CHECK(got.at(t, k) == s.at(want[t], k));
        // distances nondecreasing with leading zero
        CHECK(got.row_distances[0] == 0.0);
        for (int t = 1; t < q; ++t) CHECK(got.row_distances[t] >= got.row_distances[t - 1]);
    }
}

TEST_CASE("scatter and finalize average overlapping writes") {
    Accumulator acc(6, 8);
    PixelRowGroup g;
    g.q = 2;
    g.m = 2;
    g.data = {0.5, 0.7, 0.9, 0.1};
    g.row_indices = {0, 3};  // pixel 0 -> (0,0); pixel 3 -> (1,1) for side 2
    g.row_distances = {0, 0.1};
    const std::vector<Coord> coords{{0, 0}, {2, 4}};

    scatter_group(acc, g, coords, 2);
    CHECK(acc.sum.at(0, 0) == 0.5);
    CHECK(acc.weight.at(0, 0) == 1.0);
    CHECK(acc.sum.at(1, 1) == 0.9);
    CHECK(acc.sum.at(2, 4) == 0.7);
    CHECK(acc.sum.at(3, 5) == 0.1);

    // scattering the same group twice leaves the quotient unchanged
    Accumulator acc2(6, 8);
    scatter_group(acc2, g, coords, 2);
    scatter_group(acc2, g, coords, 2);
    CHECK(acc2.sum.at(0, 0) / acc2.weight.at(0, 0) == doctest::Approx(0.5));

    // zero-weight pixels are reported by name
    CHECK_THROWS_WITH_AS(finalize(acc), doctest::Contains("(0,1)"), std::runtime_error);

    // overlapping writes average
    Accumulator acc3(2, 2);
    PixelRowGroup one;
    one.q = 1;
    one.m = 1;
    one.row_indices = {0};
    one.row_distances = {0};
    one.data = {0.2};
    scatter_group(acc3, one, {{0, 0}}, 1);
    one.data = {0.6};
    scatter_group(acc3, one, {{0, 0}}, 1);
    CHECK(acc3.sum.at(0, 0) / acc3.weight.at(0, 0) == doctest::Approx(0.4));
}

TEST_CASE("apd statistics: constant image and histogram totals") {
    NlhParams p = profile_params(Profile::AwgnLow);
    const Plane img(64, 64, 0.3);
    const ApdReport patch = apd_statistics(img, ApdMode::Patch, p);
    const ApdReport pixel = apd_statistics(img, ApdMode::Pixel, p);
    CHECK(patch.apd == 0.0);
    CHECK(pixel.apd == 0.0);
    CHECK(patch.histogram[0] > 0);
    int64_t total = 0;
    for (int64_t c : patch.histogram) total += c;
    CHECK(total == static_cast<int64_t>(reference_grid(64, 64, 8, 4).size()));
}

TEST_CASE("pixel-mode APD never exceeds patch-mode APD on natural images") {
    NlhParams p = profile_params(Profile::AwgnLow);
    for (const char* name :
         {"camera.pgm", "moon.pgm", "coins.pgm", "astronaut_gray.pgm", "chelsea_gray.pgm"}) {
        const Plane full = testutil::load_gray(name);
        const Plane img = crop(full, 64, 64, 128, 128);
        const double patch = apd_statistics(img, ApdMode::Patch, p).apd;
        const double pixel = apd_statistics(img, ApdMode::Pixel, p).apd;
        CAPTURE(name);
        CHECK(pixel <= patch);
        CHECK(patch > 0.0);
    }
}
