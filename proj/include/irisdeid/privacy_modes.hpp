#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irisdeid/geometry.hpp"
#include "irisdeid/image.hpp"

namespace irisdeid {

struct BlendParams {
    int ring_width = 5;        // px
    bool weight_clamp = true;  // clamp the elliptical weight to [0, 1]
};

/// Weighted elliptical gradient: 0 at the center, 1 on the ellipse.
double elliptical_weight(double x, double y, const Ellipse& e);

/// Median with the library-wide tie rule: for an even count, the mean of the
/// two middle values rounded half away from zero. Throws EmptyRegion if empty.
std::uint8_t median_count(std::vector<std::uint8_t> values);

struct RingMedian {
    std::uint8_t median = 0;
    std::vector<Point2> ring;  // pixel coordinates, row-major
};

/// Band of pixels just outside the pupil ellipse: outside the original axes,
/// inside the axes grown by ring_width.
RingMedian pupil_ring_median(const GrayImage& img, const Ellipse& pupil, int ring_width);

GrayImage blend(const GrayImage& source, const GrayImage& generated, const SegMask& source_mask,
                const Ellipse& iris, const Ellipse& pupil, const BlendParams& params = {});

/// Flattens every iris pixel to the median iris digital count.
GrayImage median_iris(const GrayImage& source, const SegMask& source_mask);

}  // namespace irisdeid
