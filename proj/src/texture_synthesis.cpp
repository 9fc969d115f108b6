#include "irisdeid/texture_synthesis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace irisdeid {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::size_t IrisLayer::covered_count() const {
    return static_cast<std::size_t>(std::ranges::count_if(coverage_.data(), [](std::uint8_t c) { return c != 0; }));
}

std::vector<double> IrisLayer::covered_values() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < coverage_.size(); ++i) {
        if (coverage_.data()[i]) out.push_back(values_.data()[i]);
    }
    return out;
}

Donor prepare_donor(const GrayImage& target, const SegMask& target_mask, const GlintParams& glints) {
    require_same_size(target, target_mask, "target image and mask sizes differ");
    Donor d;
    d.eye = fit_eye_ellipses(target_mask);
    d.image = remove_glints(target, detect_glints(target, target_mask, glints));
    d.mask = target_mask;
    return d;
}

int rotation_shift(double source_theta, double target_theta, int n_theta) {
    return static_cast<int>(std::lround(n_theta * (source_theta - target_theta) / kTwoPi));
}

UnwrappedIris build_template(const Donor& donor, const RadialProfile& source_profile, const Ellipse& source_iris,
                             int n_r, int n_theta) {
    const UnwrappedIris raw = unwrap(donor.image, donor.eye.pupil, donor.eye.iris, n_r, n_theta);
    const int rows = std::max(2, static_cast<int>(std::lround(source_profile.max_radius)));
    const UnwrappedIris resampled = radial_resample(raw, rows);
    return rotate_columns(resampled, rotation_shift(source_iris.theta, donor.eye.iris.theta, n_theta));
}

IrisLayer render_iris(const UnwrappedIris& tmpl, const RadialProfile& profile, const SegMask& source_mask,
                      const Ellipse& pupil) {
    IrisLayer layer(source_mask.width(), source_mask.height());
    for (int y = 0; y < source_mask.height(); ++y) {
        for (int x = 0; x < source_mask.width(); ++x) {
            if (source_mask.at(x, y) != Label::Iris) continue;
            const double dx = x - pupil.h;
            const double dy = y - pupil.k;
            const double d = std::hypot(dx, dy);
            double phi = std::atan2(dy, dx);
            if (phi < 0.0) phi += kTwoPi;
            const auto [pe, ie] = profile.extents_at(phi);
            const double rho = (d - pe) / (ie - pe);
            if (!(rho >= 0.0 && rho <= 1.0)) continue;
            const PolarSample s = sample(tmpl, rho, phi);
            if (s.valid) layer.set(x, y, std::clamp(s.value, 0.0, 255.0));
        }
    }
    return layer;
}

std::vector<double> iris_reference_values(const GrayImage& source, const SegMask& source_mask,
                                          const GlintMask* exclude) {
    require_same_size(source, source_mask, "source image and mask sizes differ");
    if (exclude) require_same_size(source, *exclude, "exclusion mask size differs from image");
    std::vector<double> out;
    for (int y = 0; y < source.height(); ++y) {
        for (int x = 0; x < source.width(); ++x) {
            if (source_mask.at(x, y) != Label::Iris) continue;
            if (exclude && exclude->is_set(x, y)) continue;
            out.push_back(source.at(x, y));
        }
    }
    return out;
}

IrisLayer match_histogram(const IrisLayer& layer, const GrayImage& source, const SegMask& source_mask,
                          const GlintMask* exclude) {
    require_same_size(source, source_mask, "source image and mask sizes differ");
    if (layer.width() != source.width() || layer.height() != source.height()) {
        throw Error(ErrorCode::DimensionMismatch, "layer size differs from source");
    }
    const std::vector<double> ref = iris_reference_values(source, source_mask, exclude);
    std::vector<double> sorted = layer.covered_values();
    if (ref.empty() || sorted.empty()) {
        throw Error(ErrorCode::EmptyRegion, "histogram matching needs covered and reference pixels");
    }
    std::ranges::sort(sorted);

    // Cumulative reference counts per digital count.
    std::array<std::int64_t, 256> ref_cum{};
    for (double v : ref) ref_cum[static_cast<std::size_t>(v)]++;
    for (std::size_t s = 1; s < 256; ++s) ref_cum[s] += ref_cum[s - 1];

    const auto n_layer = static_cast<std::int64_t>(sorted.size());
    const auto n_ref = static_cast<std::int64_t>(ref.size());

    IrisLayer out(layer.width(), layer.height());
    for (int y = 0; y < layer.height(); ++y) {
        for (int x = 0; x < layer.width(); ++x) {
            if (!layer.covered(x, y)) continue;
            const double v = layer.value(x, y);
            const auto le = static_cast<std::int64_t>(std::ranges::upper_bound(sorted, v) - sorted.begin());
            // Smallest s with ref_cum[s] / n_ref >= le / n_layer.
            const auto it = std::ranges::find_if(ref_cum, [&](std::int64_t c) { return c * n_layer >= le * n_ref; });
            out.set(x, y, static_cast<double>(it - ref_cum.begin()));
        }
    }
    return out;
}

GrayImage composite(const GrayImage& source, const IrisLayer& layer) {
    if (layer.width() != source.width() || layer.height() != source.height()) {
        throw Error(ErrorCode::DimensionMismatch, "layer size differs from source");
    }
    GrayImage out = source;
    for (int y = 0; y < source.height(); ++y) {
        for (int x = 0; x < source.width(); ++x) {
            if (layer.covered(x, y)) {
                out.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(layer.value(x, y), 0.0, 255.0)));
            }
        }
    }
    return out;
}

}  // namespace irisdeid
