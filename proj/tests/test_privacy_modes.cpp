#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "irisdeid/glint.hpp"
#include "irisdeid/iriscode.hpp"
#include "irisdeid/privacy_modes.hpp"
#include "irisdeid/synth.hpp"
#include "test_support.hpp"

using namespace irisdeid;
using namespace testsupport;

TEST_CASE("elliptical_weight substitutions") {
    const Ellipse e{40, 30, 12, 7, 0.0};
    CHECK(std::abs(elliptical_weight(40, 30, e)) <= 1e-9);
    CHECK(std::abs(elliptical_weight(52, 30, e) - 1.0) <= 1e-9);
    CHECK(std::abs(elliptical_weight(40, 44, e) - 4.0) <= 1e-9);
}

TEST_CASE("elliptical_weight rotation invariance") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const Ellipse e{50 + 10 * u(rng), 50 + 10 * u(rng), 10 + 5 * (u(rng) + 1), 5 + 2 * (u(rng) + 1), u(rng)};
        const double x = e.h + 30 * u(rng);
        const double y = e.k + 30 * u(rng);
        const double rot = kPi * u(rng);
        const double c = std::cos(rot), s = std::sin(rot);
        const double xr = e.h + (x - e.h) * c - (y - e.k) * s;
        const double yr = e.k + (x - e.h) * s + (y - e.k) * c;
        Ellipse er = e;
        er.theta += rot;
        const double w0 = elliptical_weight(x, y, e);
        CHECK(std::abs(elliptical_weight(xr, yr, er) - w0) <= 1e-12 * std::max(1.0, w0));
    }
}

TEST_CASE("median_count") {
    CHECK(median_count({10, 20, 30}) == 20);
    CHECK(median_count({10, 20}) == 15);
    CHECK(median_count({10, 21}) == 16);  // 15.5 rounds up
    CHECK(median_count({30, 10, 20, 40}) == 25);
    CHECK(median_count({7}) == 7);
    CHECK_THROWS_AS(median_count({}), Error);
}

TEST_CASE("pupil_ring_median") {
    SUBCASE("annulus for a circular pupil") {
        GrayImage img(64, 64, 50);
        const Ellipse pupil{32, 32, 10, 10, 0};
        const RingMedian rm = pupil_ring_median(img, pupil, 5);
        std::set<std::pair<int, int>> got;
        for (const auto& p : rm.ring) got.insert({static_cast<int>(p.x), static_cast<int>(p.y)});
        std::set<std::pair<int, int>> expect;
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                const double d = std::hypot(x - 32.0, y - 32.0);
                if (d > 10.0 && d <= 15.0) expect.insert({x, y});
            }
        CHECK(got == expect);
        CHECK(rm.median == 50);
    }
    SUBCASE("median of ring values only") {
        GrayImage img(64, 64, 200);
        const Ellipse pupil{32, 32, 10, 10, 0};
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                const double d = std::hypot(x - 32.0, y - 32.0);
                if (d > 10.0 && d <= 15.0) img.at(x, y) = static_cast<std::uint8_t>(x < 32 ? 10 : 30);
            }
        const RingMedian rm = pupil_ring_median(img, pupil, 5);
        CHECK((rm.median == 10 || rm.median == 20 || rm.median == 30));
    }
    SUBCASE("errors") {
        const GrayImage img(20, 20, 0);
        CHECK_THROWS_AS(pupil_ring_median(img, {10, 10, 3, 3, 0}, 0), Error);
        try {
            (void)pupil_ring_median(img, {500, 500, 3, 3, 0}, 2);
            FAIL("expected EmptyRegion");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyRegion);
        }
    }
}

TEST_CASE("blend") {
    const Ellipse pupil{60, 60, 10, 10, 0};
    const Ellipse iris{60, 60, 30, 30, 0};
    const SegMask mask = eye_mask(120, 120, pupil, iris);
    std::mt19937 rng(5);
    GrayImage src(120, 120), gen(120, 120);
    for (auto& v : src.data()) v = static_cast<std::uint8_t>(rng() % 256);
    for (auto& v : gen.data()) v = static_cast<std::uint8_t>(rng() % 256);

    SUBCASE("idempotent when generated equals source, ring disabled") {
        CHECK(blend(src, src, mask, iris, pupil, {0, true}) == src);
    }
    SUBCASE("weight endpoints") {
        // Iris-center weight is 0: put an iris label there by hand.
        SegMask m2 = mask;
        m2.at(60, 60) = Label::Iris;
        m2.at(90, 60) = Label::Iris;
        const GrayImage out = blend(src, gen, m2, iris, pupil, {0, true});
        CHECK(out.at(60, 60) == src.at(60, 60));
        CHECK(out.at(90, 60) == gen.at(90, 60));
    }
    SUBCASE("non-iris untouched and iris is a convex combination") {
        const BlendParams p{5, true};
        const GrayImage out = blend(src, gen, mask, iris, pupil, p);
        const RingMedian rm = pupil_ring_median(src, pupil, 5);
        GrayImage g2 = gen;
        for (const auto& q : rm.ring) g2.at(static_cast<int>(q.x), static_cast<int>(q.y)) = rm.median;
        for (int y = 0; y < 120; ++y)
            for (int x = 0; x < 120; ++x) {
                if (mask.at(x, y) != Label::Iris) {
                    CHECK(out.at(x, y) == src.at(x, y));
                    continue;
                }
                const int lo = std::min(src.at(x, y), g2.at(x, y));
                const int hi = std::max(src.at(x, y), g2.at(x, y));
                CHECK(out.at(x, y) >= lo);
                CHECK(out.at(x, y) <= hi);
                const double w = std::min(1.0, elliptical_weight(x, y, iris));
                CHECK(out.at(x, y) == std::lround(w * g2.at(x, y) + (1 - w) * src.at(x, y)));
            }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(blend(src, GrayImage(119, 120), mask, iris, pupil), Error);
    }
}

TEST_CASE("median_iris") {
    SUBCASE("three values") {
        const std::vector<std::uint8_t> labels{2, 2, 2, 0, 3};
        const SegMask m = SegMask::from_bytes(5, 1, labels);
        GrayImage img(5, 1, std::vector<std::uint8_t>{10, 30, 20, 99, 5});
        const GrayImage out = median_iris(img, m);
        CHECK(out == GrayImage(5, 1, std::vector<std::uint8_t>{20, 20, 20, 99, 5}));
    }
    SUBCASE("constant iris is a fixed point") {
        const SegMask m = eye_mask(80, 80, {40, 40, 8, 8, 0}, {40, 40, 20, 20, 0});
        GrayImage img(80, 80, 77);
        CHECK(median_iris(img, m) == img);
    }
    SUBCASE("no iris") {
        const SegMask m(5, 5, Label::Background);
        CHECK_THROWS_AS(median_iris(GrayImage(5, 5), m), Error);
    }
    SUBCASE("de-correlation against the source code") {
        // Median output as the pipeline emits it: flattened iris, source glints restored.
        double sum = 0.0;
        int n = 0;
        for (const SynthEyeSpec& spec : default_corpus(20)) {
            const SynthEye eye = synth_eye(spec);
            const EyeEllipses fit = fit_eye_ellipses(eye.mask);
            const GlintMask glints = detect_glints(eye.image, eye.mask, {250, 1});
            const EncodingParams ep;
            const IrisCode a = encode(eye.image, eye.mask, fit.pupil, fit.iris, ep, glints);
            const GrayImage out = restore_glints(median_iris(eye.image, eye.mask), eye.image, glints);
            const IrisCode b = encode(out, eye.mask, fit.pupil, fit.iris, ep, glints);
            sum += hamming(a, b, ep.shift_range).hd;
            ++n;
        }
        CHECK(sum / n >= 0.35);
    }
}
