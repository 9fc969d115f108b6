#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "irisdeid/rubbersheet.hpp"
#include "test_support.hpp"

using namespace irisdeid;
using namespace testsupport;

namespace {

UnwrappedIris random_template(int n_r, int n_theta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> v(0.0, 255.0);
    UnwrappedIris u(n_r, n_theta);
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_theta; ++j) {
            u.value(i, j) = v(rng);
            u.set_valid(i, j, true);
        }
    return u;
}

GrayImage radial_field(int w, int h, double cx, double cy) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = static_cast<std::uint8_t>(std::lround(std::min(255.0, std::hypot(x - cx, y - cy))));
    return img;
}

}  // namespace

TEST_CASE("unwrap") {
    SUBCASE("constant image") {
        const GrayImage img(128, 128, 100);
        const UnwrappedIris u = unwrap(img, {64, 64, 10, 9, 0.2}, {62, 65, 30, 27, -0.3}, 16, 64);
        for (int i = 0; i < u.n_r(); ++i)
            for (int j = 0; j < u.n_theta(); ++j) {
                CHECK(u.valid(i, j));
                CHECK(u.value(i, j) == 100.0);
            }
    }
    SUBCASE("radial distance field") {
        const GrayImage img = radial_field(128, 128, 64, 64);
        const UnwrappedIris u = unwrap(img, {64, 64, 10, 10, 0}, {64, 64, 30, 30, 0}, 21, 360);
        for (int i = 0; i < 21; ++i)
            for (int j = 0; j < 360; ++j) CHECK(std::abs(u.value(i, j) - (10.0 + i)) <= 0.5);
    }
    SUBCASE("outer ellipse past the image edge") {
        const GrayImage small = radial_field(80, 80, 40, 40);
        // Same content embedded in a larger frame, offset by 20 px.
        GrayImage big(120, 120, 0);
        for (int y = 0; y < 80; ++y)
            for (int x = 0; x < 80; ++x) big.at(x + 20, y + 20) = small.at(x, y);
        const UnwrappedIris a = unwrap(small, {40, 40, 12, 12, 0}, {40, 40, 48, 44, 0.4}, 24, 120);
        const UnwrappedIris b = unwrap(big, {60, 60, 12, 12, 0}, {60, 60, 48, 44, 0.4}, 24, 120);
        int invalid = 0;
        for (int i = 0; i < 24; ++i)
            for (int j = 0; j < 120; ++j) {
                if (!a.valid(i, j)) {
                    ++invalid;
                    continue;
                }
                CHECK(std::abs(a.value(i, j) - b.value(i, j)) < 1e-9);
            }
        CHECK(invalid > 0);
        CHECK(a.valid(0, 0));
    }
    SUBCASE("inner not inside outer") {
        const GrayImage img(64, 64, 1);
        CHECK_THROWS_AS(unwrap(img, {32, 32, 20, 20, 0}, {32, 32, 10, 10, 0}, 8, 16), Error);
        CHECK_THROWS_AS(unwrap(img, {5, 5, 2, 2, 0}, {40, 40, 10, 10, 0}, 8, 16), Error);
    }
    SUBCASE("unwrap then sample at grid nodes") {
        const GrayImage img = radial_field(128, 128, 50, 70);
        const UnwrappedIris u = unwrap(img, {64, 64, 10, 8, 0.3}, {64, 64, 30, 26, 0.1}, 17, 90);
        for (int i = 0; i < u.n_r(); ++i)
            for (int j = 0; j < u.n_theta(); ++j) {
                const PolarSample s = sample(u, static_cast<double>(i) / 16, 2 * kPi * j / 90);
                CHECK(s.valid);
                CHECK(s.value == u.value(i, j));
            }
    }
    SUBCASE("deterministic") {
        const GrayImage img = radial_field(128, 128, 50, 70);
        CHECK(unwrap(img, {64, 64, 10, 8, 0.3}, {64, 64, 30, 26, 0.1}, 17, 90) ==
              unwrap(img, {64, 64, 10, 8, 0.3}, {64, 64, 30, 26, 0.1}, 17, 90));
    }
}

TEST_CASE("radial_resample") {
    SUBCASE("constant column") {
        UnwrappedIris u(16, 8);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 8; ++j) {
                u.value(i, j) = 100;
                u.set_valid(i, j, true);
            }
        const UnwrappedIris r = radial_resample(u, 64);
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 8; ++j) {
                CHECK(r.valid(i, j));
                CHECK(std::abs(r.value(i, j) - 100) < 1e-12);
            }
    }
    SUBCASE("linear ramp is reproduced") {
        UnwrappedIris u(16, 8);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 8; ++j) {
                u.value(i, j) = i;
                u.set_valid(i, j, true);
            }
        const UnwrappedIris r = radial_resample(u, 64);
        double worst = 0.0;
        for (int k = 0; k < 64; ++k) worst = std::max(worst, std::abs(r.value(k, 3) - 15.0 * k / 63.0));
        CHECK(worst <= 1e-6);
    }
    SUBCASE("linear ramp with fewer than four rows") {
        UnwrappedIris u(3, 8);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 8; ++j) {
                u.value(i, j) = 10 * i;
                u.set_valid(i, j, true);
            }
        const UnwrappedIris r = radial_resample(u, 5);
        for (int k = 0; k < 5; ++k) CHECK(std::abs(r.value(k, 0) - 5.0 * k) < 1e-12);
    }
    SUBCASE("invalid source sample poisons exactly its kernel footprints") {
        const int n = 16;
        const int m = 64;
        const int bad = 7;
        UnwrappedIris u = random_template(n, 8, 3);
        u.set_valid(bad, 2, false);
        const UnwrappedIris r = radial_resample(u, m);
        // Footprint oracle: nodes hit exactly touch only themselves; otherwise the four
        // Catmull-Rom taps, with out-of-range ghosts expanding to the two end samples.
        for (int k = 0; k < m; ++k) {
            const double s = static_cast<double>(k) * (n - 1) / (m - 1);
            std::set<int> fp;
            const int i0 = std::clamp(static_cast<int>(std::floor(s)), 0, n - 2);
            const double t = s - i0;
            if (t == 0.0) fp = {i0};
            else if (t == 1.0) fp = {i0 + 1};
            else {
                for (int idx = i0 - 1; idx <= i0 + 2; ++idx) {
                    if (idx < 0) fp.insert({0, 1});
                    else if (idx >= n) fp.insert({n - 1, n - 2});
                    else fp.insert(idx);
                }
            }
            CHECK(r.valid(k, 2) == (fp.count(bad) == 0));
            CHECK(r.valid(k, 1));
        }
    }
    SUBCASE("same size is the identity") {
        const UnwrappedIris u = random_template(20, 16, 11);
        const UnwrappedIris r = radial_resample(u, 20);
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 16; ++j) {
                CHECK(r.valid(i, j));
                CHECK(std::abs(r.value(i, j) - u.value(i, j)) <= 1e-9);
            }
    }
    SUBCASE("values clamped to digital count range") {
        UnwrappedIris u(6, 8);
        const double col[6] = {0, 0, 255, 255, 0, 0};
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 8; ++j) {
                u.value(i, j) = col[i];
                u.set_valid(i, j, true);
            }
        const UnwrappedIris r = radial_resample(u, 41);
        for (int k = 0; k < 41; ++k) {
            CHECK(r.value(k, 0) >= 0.0);
            CHECK(r.value(k, 0) <= 255.0);
        }
    }
}

TEST_CASE("rotate_columns") {
    const UnwrappedIris u = random_template(5, 24, 21);
    CHECK(rotate_columns(u, 0) == u);
    CHECK(rotate_columns(u, 24) == u);
    CHECK(rotate_columns(u, -48) == u);
    std::mt19937 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = std::uniform_int_distribution<int>(-60, 60)(rng);
        CHECK(rotate_columns(rotate_columns(u, k), -k) == u);
        const UnwrappedIris r = rotate_columns(u, k);
        for (int i = 0; i < 5; ++i) {
            std::multiset<double> a, b;
            for (int j = 0; j < 24; ++j) {
                a.insert(u.value(i, j));
                b.insert(r.value(i, j));
            }
            CHECK(a == b);
        }
    }
    const UnwrappedIris r = rotate_columns(u, 3);
    CHECK(r.value(2, 3) == u.value(2, 0));
    CHECK(r.value(2, 1) == u.value(2, 22));
}

TEST_CASE("sample") {
    SUBCASE("grid node") {
        const UnwrappedIris u = random_template(9, 32, 8);
        const PolarSample s = sample(u, 3.0 / 8.0, 2 * kPi * 5 / 32);
        CHECK(s.valid);
        CHECK(s.value == u.value(3, 5));
    }
    SUBCASE("constant template") {
        UnwrappedIris u(4, 8);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 8; ++j) {
                u.value(i, j) = 42;
                u.set_valid(i, j, true);
            }
        for (double r : {0.0, 0.13, 0.5, 0.99, 1.0})
            for (double phi : {0.0, 1.0, 3.3, 6.2, -0.4}) CHECK(std::abs(sample(u, r, phi).value - 42) < 1e-12);
    }
    SUBCASE("angular wrap between last and first column") {
        UnwrappedIris u(2, 8);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 8; ++j) {
                u.value(i, j) = (j == 7) ? 10 : (j == 0 ? 30 : 0);
                u.set_valid(i, j, true);
            }
        // phi = 2pi - eps with eps a quarter column: 0.25 * col7 + 0.75 * col0 = 25.
        const double eps = 0.25 * 2 * kPi / 8;
        const PolarSample s = sample(u, 0.0, 2 * kPi - eps);
        CHECK(s.valid);
        CHECK(std::abs(s.value - 25.0) < 1e-9);
    }
    SUBCASE("invalid neighbour") {
        UnwrappedIris u = random_template(4, 8, 1);
        u.set_valid(1, 1, false);
        CHECK_FALSE(sample(u, 0.5 / 3.0, 2 * kPi * 1.5 / 8).valid);
        CHECK(sample(u, 2.5 / 3.0, 2 * kPi * 4.5 / 8).valid);
    }
}
