#pragma once

#include "irisdeid/image.hpp"

namespace irisdeid {

struct GlintParams {
    int threshold = 250;  // digital count, in [1, 255]
    int dilate = 1;       // px, square structuring element of side 2*dilate+1
};

/// Whole-frame detection: pixels >= threshold, then dilated.
GlintMask detect_glints(const GrayImage& img, const GlintParams& params);

/// Detection restricted to iris and pupil pixels of `region` before dilation.
GlintMask detect_glints(const GrayImage& img, const SegMask& region, const GlintParams& params);

/// Fills glint pixels from the outside in: each pass assigns every unfilled
/// glint pixel that touches known pixels the mean of its known 8-neighbours.
GrayImage remove_glints(const GrayImage& img, const GlintMask& glints);

/// Copies glint pixels of `source` onto `generated`.
GrayImage restore_glints(const GrayImage& generated, const GrayImage& source, const GlintMask& glints);

}  // namespace irisdeid
