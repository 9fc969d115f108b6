#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "irisdeid/glint.hpp"
#include "irisdeid/synth.hpp"

using namespace irisdeid;

TEST_CASE("detect_glints") {
    SUBCASE("nothing above threshold") {
        GrayImage img(10, 10, 100);
        img.at(3, 3) = 240;
        CHECK(detect_glints(img, {250, 1}).count() == 0);
    }
    SUBCASE("single pixel, no dilation") {
        GrayImage img(10, 10, 100);
        img.at(4, 6) = 255;
        const GlintMask m = detect_glints(img, {250, 0});
        CHECK(m.count() == 1);
        CHECK(m.is_set(4, 6));
    }
    SUBCASE("single pixel, dilation 1") {
        GrayImage img(10, 10, 100);
        img.at(4, 6) = 255;
        const GlintMask m = detect_glints(img, {250, 1});
        CHECK(m.count() == 9);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) CHECK(m.is_set(4 + dx, 6 + dy));
    }
    SUBCASE("dilation is clipped at the border") {
        GrayImage img(10, 10, 100);
        img.at(0, 0) = 255;
        CHECK(detect_glints(img, {250, 1}).count() == 4);
    }
    SUBCASE("region restriction to iris and pupil") {
        GrayImage img(6, 1, 255);
        const std::vector<std::uint8_t> labels{0, 1, 2, 3, 1, 0};
        const SegMask mask = SegMask::from_bytes(6, 1, labels);
        const GlintMask m = detect_glints(img, mask, {250, 0});
        CHECK(m.count() == 2);
        CHECK(m.is_set(2, 0));
        CHECK(m.is_set(3, 0));
    }
    SUBCASE("threshold range") {
        const GrayImage img(4, 4, 0);
        CHECK_THROWS_AS(detect_glints(img, {0, 1}), Error);
        CHECK_THROWS_AS(detect_glints(img, {256, 1}), Error);
    }
    SUBCASE("monotone in threshold before dilation") {
        std::mt19937 rng(3);
        GrayImage img(32, 32);
        for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() % 256);
        for (int t = 1; t < 255; t += 7) {
            const GlintMask lo = detect_glints(img, {t, 0});
            const GlintMask hi = detect_glints(img, {t + 7 > 255 ? 255 : t + 7, 0});
            for (int y = 0; y < 32; ++y)
                for (int x = 0; x < 32; ++x)
                    if (hi.is_set(x, y)) CHECK(lo.is_set(x, y));
        }
    }
}

TEST_CASE("remove_glints") {
    SUBCASE("empty mask is the identity") {
        GrayImage img(8, 8);
        for (int i = 0; i < 64; ++i) img.data()[i] = static_cast<std::uint8_t>(i * 3);
        CHECK(remove_glints(img, GlintMask(8, 8)) == img);
    }
    SUBCASE("single pixel in a flat field") {
        GrayImage img(5, 5, 60);
        img.at(2, 2) = 255;
        GlintMask g(5, 5);
        g.at(2, 2) = 1;
        CHECK(remove_glints(img, g).at(2, 2) == 60);
    }
    SUBCASE("3x3 block in a linear ramp stays within the border range") {
        GrayImage img(9, 9);
        for (int y = 0; y < 9; ++y)
            for (int x = 0; x < 9; ++x) img.at(x, y) = static_cast<std::uint8_t>(50 + 10 * x);
        GlintMask g(9, 9);
        for (int y = 3; y <= 5; ++y)
            for (int x = 3; x <= 5; ++x) {
                g.at(x, y) = 1;
                img.at(x, y) = 255;
            }
        const GrayImage out = remove_glints(img, g);
        // Border ring around the block spans columns 2..6: values 70..110.
        for (int y = 3; y <= 5; ++y)
            for (int x = 3; x <= 5; ++x) {
                CHECK(out.at(x, y) >= 70);
                CHECK(out.at(x, y) <= 110);
            }
        for (int y = 0; y < 9; ++y)
            for (int x = 0; x < 9; ++x)
                if (!g.is_set(x, y)) CHECK(out.at(x, y) == img.at(x, y));
    }
    SUBCASE("every pixel a glint") {
        const GrayImage img(3, 3, 255);
        const GlintMask g(3, 3, 1);
        try {
            (void)remove_glints(img, g);
            FAIL("expected AllGlint");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AllGlint);
        }
    }
    SUBCASE("never modifies non-glint pixels") {
        std::mt19937 rng(8);
        GrayImage img(40, 30);
        for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() % 256);
        const GlintMask g = detect_glints(img, {240, 1});
        const GrayImage out = remove_glints(img, g);
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 40; ++x)
                if (!g.is_set(x, y)) CHECK(out.at(x, y) == img.at(x, y));
    }
}

TEST_CASE("restore_glints") {
    GrayImage src(6, 6);
    GrayImage gen(6, 6, 7);
    for (int i = 0; i < 36; ++i) src.data()[i] = static_cast<std::uint8_t>(200 + i);
    CHECK(restore_glints(gen, src, GlintMask(6, 6)) == gen);
    CHECK(restore_glints(gen, src, GlintMask(6, 6, 1)) == src);
    CHECK_THROWS_AS(restore_glints(GrayImage(5, 6), src, GlintMask(6, 6)), Error);
}

TEST_CASE("restored glints reproduce the source glint set") {
    SynthEyeSpec spec;
    spec.glints = {{165, 120}, {160, 150}, {130, 110}};
    const SynthEye eye = synth_eye(spec);
    const GlintParams p{250, 1};
    const GlintMask glints = detect_glints(eye.image, eye.mask, p);
    REQUIRE(glints.count() > 0);
    // Any synthesis that keeps non-glint pixels below the threshold.
    GrayImage gen = eye.image;
    for (auto& v : gen.data()) v = static_cast<std::uint8_t>(v / 2);
    const GrayImage out = restore_glints(gen, eye.image, glints);
    for (int t = 250; t <= 255; ++t) {
        const GlintParams q{t, 0};
        CHECK(detect_glints(out, eye.mask, q) == detect_glints(eye.image, eye.mask, q));
    }
}
