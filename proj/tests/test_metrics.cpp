#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "irisdeid/metrics.hpp"

using namespace irisdeid;

namespace {
SegMask mask_of(int w, int h, std::vector<std::uint8_t> v) { return SegMask::from_bytes(w, h, v); }
}  // namespace

TEST_CASE("iou") {
    SUBCASE("identical masks") {
        const SegMask m = mask_of(3, 2, {0, 1, 2, 3, 2, 1});
        const IoUReport r = iou(m, m);
        for (const auto& c : r.per_class) {
            REQUIRE(c.has_value());
            CHECK(*c == 1.0);
        }
        CHECK(r.miou == 1.0);
    }
    SUBCASE("hand-counted 2x2") {
        const SegMask gt = mask_of(2, 2, {3, 3, 0, 0});
        const SegMask pred = mask_of(2, 2, {3, 0, 0, 0});
        const IoUReport r = iou(pred, gt);
        CHECK(*r.per_class[3] == 0.5);
        CHECK(*r.per_class[0] == 2.0 / 3.0);
        CHECK_FALSE(r.per_class[1].has_value());
        CHECK_FALSE(r.per_class[2].has_value());
        CHECK(r.miou == (0.5 + 2.0 / 3.0) / 2.0);
        CHECK(std::abs(r.miou - 0.583333) < 1e-6);
    }
    SUBCASE("disjoint single-class masks") {
        const IoUReport r = iou(mask_of(2, 1, {1, 1}), mask_of(2, 1, {2, 2}));
        CHECK(*r.per_class[1] == 0.0);
        CHECK(*r.per_class[2] == 0.0);
        CHECK(r.miou == 0.0);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(iou(SegMask(2, 2), SegMask(2, 3)), Error);
    }
    SUBCASE("symmetric and invariant to joint pixel permutation") {
        std::mt19937 rng(4);
        for (int t = 0; t < 50; ++t) {
            std::vector<std::uint8_t> a(64), b(64);
            for (auto& v : a) v = static_cast<std::uint8_t>(rng() % 4);
            for (auto& v : b) v = static_cast<std::uint8_t>(rng() % 4);
            const IoUReport ab = iou(mask_of(8, 8, a), mask_of(8, 8, b));
            const IoUReport ba = iou(mask_of(8, 8, b), mask_of(8, 8, a));
            CHECK(ab.miou == ba.miou);
            std::vector<int> perm(64);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<std::uint8_t> pa(64), pb(64);
            for (int i = 0; i < 64; ++i) {
                pa[i] = a[perm[i]];
                pb[i] = b[perm[i]];
            }
            const IoUReport pr = iou(mask_of(8, 8, pa), mask_of(8, 8, pb));
            CHECK(pr.miou == ab.miou);
            for (int c = 0; c < 4; ++c) {
                CHECK(pr.per_class[c] == ab.per_class[c]);
                if (ab.per_class[c]) {
                    CHECK(*ab.per_class[c] >= 0.0);
                    CHECK(*ab.per_class[c] <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("center_errors") {
    const std::vector<Point2> gt{{10, 5}, {20, 7}, {30, 12}};
    SUBCASE("perfect prediction") {
        const CenterErrorReport r = center_errors(gt, gt);
        CHECK(r.mse_x == 0.0);
        CHECK(r.mse_y == 0.0);
        CHECK(r.r2_x == 1.0);
        CHECK(r.r2_y == 1.0);
        CHECK(r.n == 3);
    }
    SUBCASE("constant +1 px x offset") {
        std::vector<Point2> pred = gt;
        for (auto& p : pred) p.x += 1.0;
        const CenterErrorReport r = center_errors(pred, gt);
        CHECK(r.mse_x == 1.0);
        CHECK(r.r2_x == doctest::Approx(0.985).epsilon(1e-15));
        CHECK(r.mse_y == 0.0);
    }
    SUBCASE("offset raises mse by delta squared") {
        for (double d : {0.25, 1.5, -3.0}) {
            std::vector<Point2> pred = gt;
            for (auto& p : pred) p.x += d;
            CHECK(center_errors(pred, gt).mse_x == doctest::Approx(d * d).epsilon(1e-14));
        }
    }
    SUBCASE("length mismatch") {
        const std::vector<Point2> two{{1, 1}, {2, 2}};
        try {
            (void)center_errors(two, gt);
            FAIL("expected LengthMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::LengthMismatch);
        }
    }
    SUBCASE("order independence") {
        std::vector<Point2> pred{{11, 5.5}, {19, 7}, {30.5, 11}};
        const CenterErrorReport a = center_errors(pred, gt);
        std::vector<Point2> p2{pred[2], pred[0], pred[1]};
        std::vector<Point2> g2{gt[2], gt[0], gt[1]};
        const CenterErrorReport b = center_errors(p2, g2);
        CHECK(a.mse_x == doctest::Approx(b.mse_x).epsilon(1e-15));
        CHECK(a.r2_y == doctest::Approx(b.r2_y).epsilon(1e-15));
    }
}

TEST_CASE("outlier_trimmed_mse") {
    const std::vector<double> e{1, 1, 1, 1, 100};
    CHECK(outlier_trimmed_mse(e, 0.05) == 1.0);
    CHECK(outlier_trimmed_mse(e, 0.0) == doctest::Approx((4.0 + 10000.0) / 5.0));
    const std::vector<double> same{-2, 2, 2, -2, 2, 2};
    for (double t : {0.0, 0.1, 0.3, 0.49}) CHECK(outlier_trimmed_mse(same, t) == 4.0);
    CHECK_THROWS_AS(outlier_trimmed_mse(e, 0.5), Error);
    CHECK_THROWS_AS(outlier_trimmed_mse(e, -0.1), Error);
    try {
        (void)outlier_trimmed_mse(std::vector<double>{}, 0.1);
        FAIL("expected EmptyAfterTrim");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::EmptyAfterTrim);
    }
}

TEST_CASE("r_squared") {
    const std::vector<double> t{1, 2, 3, 4};
    CHECK(r_squared(t, t) == 1.0);
    const std::vector<double> p{2, 2, 3, 4};
    CHECK(r_squared(p, t) == doctest::Approx(1.0 - 1.0 / 5.0));
    const std::vector<double> c{5, 5, 5};
    CHECK(r_squared(c, c) == 1.0);
    CHECK(std::isnan(r_squared(std::vector<double>{5, 6, 5}, c)));
}

TEST_CASE("ks_distance") {
    const std::vector<double> a{1, 2, 3, 4};
    CHECK(ks_distance(a, a) == 0.0);
    CHECK(ks_distance(a, std::vector<double>{10, 11}) == 1.0);
    CHECK(ks_distance(a, std::vector<double>{1, 2}) == doctest::Approx(0.5));
    CHECK(ks_distance(std::vector<double>{1, 2}, a) == ks_distance(a, std::vector<double>{1, 2}));
}

TEST_CASE("mean_std") {
    const MeanStd m = mean_std(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9});
    CHECK(m.mean == 5.0);
    CHECK(m.std == 2.0);
}
