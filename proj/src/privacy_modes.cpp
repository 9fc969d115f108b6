#include "irisdeid/privacy_modes.hpp"

#include <algorithm>
#include <cmath>

namespace irisdeid {

double elliptical_weight(double x, double y, const Ellipse& e) {
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    const double u = (x - e.h) * c + (y - e.k) * s;
    const double v = (y - e.k) * c - (x - e.h) * s;
    return u * u / (e.a * e.a) + v * v / (e.b * e.b);
}

std::uint8_t median_count(std::vector<std::uint8_t> values) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyRegion, "median of an empty pixel set");
    }
    const std::size_t mid = values.size() / 2;
    std::ranges::nth_element(values, values.begin() + static_cast<std::ptrdiff_t>(mid));
    const int upper = values[mid];
    if (values.size() % 2 == 1) return static_cast<std::uint8_t>(upper);
    const int lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    // Non-negative sum, so integer half-up equals round-half-away-from-zero.
    return static_cast<std::uint8_t>((lower + upper + 1) / 2);
}

RingMedian pupil_ring_median(const GrayImage& img, const Ellipse& pupil, int ring_width) {
    if (ring_width <= 0) {
        throw Error(ErrorCode::InvalidArgument, "ring width must be > 0");
    }
    Ellipse grown = pupil;
    grown.a += ring_width;
    grown.b += ring_width;
    RingMedian out;
    std::vector<std::uint8_t> values;
    const int x0 = std::max(0, static_cast<int>(std::floor(pupil.h - grown.a)) - 1);
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(pupil.h + grown.a)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(pupil.k - grown.a)) - 1);
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(pupil.k + grown.a)) + 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (elliptical_weight(x, y, pupil) > 1.0 && elliptical_weight(x, y, grown) <= 1.0) {
                out.ring.push_back({static_cast<double>(x), static_cast<double>(y)});
                values.push_back(img.at(x, y));
            }
        }
    }
    if (values.empty()) {
        throw Error(ErrorCode::EmptyRegion, "pupil ring contains no pixels");
    }
    out.median = median_count(std::move(values));
    return out;
}

GrayImage blend(const GrayImage& source, const GrayImage& generated, const SegMask& source_mask,
                const Ellipse& iris, const Ellipse& pupil, const BlendParams& params) {
    require_same_size(source, generated, "source and generated sizes differ");
    require_same_size(source, source_mask, "source image and mask sizes differ");

    GrayImage gen = generated;
    if (params.ring_width > 0) {
        const RingMedian rm = pupil_ring_median(source, pupil, params.ring_width);
        for (const auto& p : rm.ring) {
            gen.at(static_cast<int>(p.x), static_cast<int>(p.y)) = rm.median;
        }
    }

    GrayImage out = source;
    for (int y = 0; y < source.height(); ++y) {
        for (int x = 0; x < source.width(); ++x) {
            if (source_mask.at(x, y) != Label::Iris) continue;
            double w = elliptical_weight(x, y, iris);
            if (params.weight_clamp) w = std::min(1.0, w);
            const double v = w * gen.at(x, y) + (1.0 - w) * source.at(x, y);
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    return out;
}

GrayImage median_iris(const GrayImage& source, const SegMask& source_mask) {
    require_same_size(source, source_mask, "source image and mask sizes differ");
    std::vector<std::uint8_t> values;
    for (int y = 0; y < source.height(); ++y) {
        for (int x = 0; x < source.width(); ++x) {
            if (source_mask.at(x, y) == Label::Iris) values.push_back(source.at(x, y));
        }
    }
    const std::uint8_t m = median_count(std::move(values));
    GrayImage out = source;
    for (int y = 0; y < source.height(); ++y) {
        for (int x = 0; x < source.width(); ++x) {
            if (source_mask.at(x, y) == Label::Iris) out.at(x, y) = m;
        }
    }
    return out;
}

}  // namespace irisdeid
