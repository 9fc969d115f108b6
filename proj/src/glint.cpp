#include "irisdeid/glint.hpp"

#include <cmath>
#include <vector>

namespace irisdeid {

namespace {

void check_threshold(const GlintParams& p) {
    if (p.threshold < 1 || p.threshold > 255) {
        throw Error(ErrorCode::InvalidArgument, "glint threshold must be in [1, 255]");
    }
    if (p.dilate < 0) {
        throw Error(ErrorCode::InvalidArgument, "glint dilation must be >= 0");
    }
}

GlintMask dilate(const GlintMask& seeds, int radius) {
    if (radius == 0) return seeds;
    GlintMask out(seeds.width(), seeds.height());
    for (int y = 0; y < seeds.height(); ++y) {
        for (int x = 0; x < seeds.width(); ++x) {
            if (!seeds.is_set(x, y)) continue;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (out.contains(x + dx, y + dy)) out.at(x + dx, y + dy) = 1;
                }
            }
        }
    }
    return out;
}

template <class Keep>
GlintMask threshold_and_dilate(const GrayImage& img, const GlintParams& params, Keep keep) {
    check_threshold(params);
    GlintMask seeds(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (img.at(x, y) >= params.threshold && keep(x, y)) seeds.at(x, y) = 1;
        }
    }
    return dilate(seeds, params.dilate);
}

}  // namespace

GlintMask detect_glints(const GrayImage& img, const GlintParams& params) {
    return threshold_and_dilate(img, params, [](int, int) { return true; });
}

GlintMask detect_glints(const GrayImage& img, const SegMask& region, const GlintParams& params) {
    require_same_size(img, region, "glint region mask size differs from image");
    return threshold_and_dilate(img, params, [&](int x, int y) {
        const Label l = region.at(x, y);
        return l == Label::Iris || l == Label::Pupil;
    });
}

GrayImage remove_glints(const GrayImage& img, const GlintMask& glints) {
    require_same_size(img, glints, "glint mask size differs from image");
    const int w = img.width();
    const int h = img.height();
    if (glints.count() == img.size()) {
        throw Error(ErrorCode::AllGlint, "every pixel is flagged as glint");
    }

    std::vector<double> value(img.size());
    std::vector<std::uint8_t> known(img.size());
    std::vector<std::size_t> pending;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            value[i] = img.at(x, y);
            known[i] = glints.is_set(x, y) ? 0 : 1;
            if (!known[i]) pending.push_back(i);
        }
    }

    struct Fill {
        std::size_t index;
        double value;
    };
    std::vector<Fill> front;
    while (!pending.empty()) {
        front.clear();
        std::vector<std::size_t> still;
        for (std::size_t i : pending) {
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            double sum = 0.0;
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if ((dx == 0 && dy == 0) || !img.contains(x + dx, y + dy)) continue;
                    const std::size_t j = static_cast<std::size_t>(y + dy) * w + (x + dx);
                    if (known[j]) {
                        sum += value[j];
                        ++n;
                    }
                }
            }
            if (n > 0) {
                front.push_back({i, sum / n});
            } else {
                still.push_back(i);
            }
        }
        for (const auto& f : front) {
            value[f.index] = f.value;
            known[f.index] = 1;
        }
        pending.swap(still);
    }

    GrayImage out = img;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (glints.is_set(x, y)) {
                out.at(x, y) = static_cast<std::uint8_t>(std::lround(value[static_cast<std::size_t>(y) * w + x]));
            }
        }
    }
    return out;
}

GrayImage restore_glints(const GrayImage& generated, const GrayImage& source, const GlintMask& glints) {
    require_same_size(generated, source, "generated and source sizes differ");
    require_same_size(generated, glints, "glint mask size differs from image");
    GrayImage out = generated;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            if (glints.is_set(x, y)) out.at(x, y) = source.at(x, y);
        }
    }
    return out;
}

}  // namespace irisdeid
