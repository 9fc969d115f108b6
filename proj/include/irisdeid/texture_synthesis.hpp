#pragma once

#include <cstdint>
#include <vector>

#include "irisdeid/geometry.hpp"
#include "irisdeid/glint.hpp"
#include "irisdeid/image.hpp"
#include "irisdeid/rubbersheet.hpp"

namespace irisdeid {

/// Synthesized iris texture in source-frame coordinates.
class IrisLayer {
public:
    IrisLayer() = default;
    IrisLayer(int width, int height) : values_(width, height, 0.0), coverage_(width, height, 0) {}

    int width() const noexcept { return values_.width(); }
    int height() const noexcept { return values_.height(); }

    double value(int x, int y) const { return values_.at(x, y); }
    bool covered(int x, int y) const { return coverage_.at(x, y) != 0; }
    void set(int x, int y, double v) {
        values_.at(x, y) = v;
        coverage_.at(x, y) = 1;
    }
    std::size_t covered_count() const;

    /// Covered values in row-major order.
    std::vector<double> covered_values() const;

private:
    Raster<double> values_;
    Raster<std::uint8_t> coverage_;
};

/// Donor (target) eye after glint removal, with its fitted geometry.
struct Donor {
    GrayImage image;
    SegMask mask;
    EyeEllipses eye;
};

Donor prepare_donor(const GrayImage& target, const SegMask& target_mask, const GlintParams& glints);

/// Column shift that turns the donor's iris orientation into the source's:
/// round(n_theta * (source_theta - target_theta) / 2pi).
int rotation_shift(double source_theta, double target_theta, int n_theta);

/// Unwraps the donor between its own pupil and iris ellipses at n_r x n_theta,
/// resamples radially to round(R) rows (one row per source pixel of radius)
/// and rotates to the source iris orientation.
UnwrappedIris build_template(const Donor& donor, const RadialProfile& source_profile, const Ellipse& source_iris,
                             int n_r, int n_theta);

/// Inverse rubber-sheet: every iris-labeled source pixel looks up its own
/// normalized radius against the per-ray extents and samples the template.
IrisLayer render_iris(const UnwrappedIris& tmpl, const RadialProfile& profile, const SegMask& source_mask,
                      const Ellipse& pupil);

/// Histogram specification of the covered layer values against the source iris
/// pixels. Pixels flagged in `exclude` (typically glints) are left out of the
/// reference distribution.
IrisLayer match_histogram(const IrisLayer& layer, const GrayImage& source, const SegMask& source_mask,
                          const GlintMask* exclude = nullptr);

/// Reference values used by match_histogram, in row-major order.
std::vector<double> iris_reference_values(const GrayImage& source, const SegMask& source_mask,
                                          const GlintMask* exclude = nullptr);

GrayImage composite(const GrayImage& source, const IrisLayer& layer);

}  // namespace irisdeid
