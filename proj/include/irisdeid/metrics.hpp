#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "irisdeid/image.hpp"

namespace irisdeid {

struct IoUReport {
    /// IoU per class id (background, sclera, iris, pupil); empty when the
    /// class is absent from both masks.
    std::array<std::optional<double>, 4> per_class{};
    double miou = 0.0;
};

IoUReport iou(const SegMask& pred, const SegMask& gt);

struct CenterErrorReport {
    double mse_x = 0.0;
    double mse_y = 0.0;
    double r2_x = 0.0;  // NaN when the ground-truth series is constant
    double r2_y = 0.0;
    std::size_t n = 0;
};

CenterErrorReport center_errors(std::span<const Point2> pred, std::span<const Point2> gt);

/// Mean square of `errors` after dropping the ceil(trim_fraction * n) largest
/// absolute values.
double outlier_trimmed_mse(std::span<const double> errors, double trim_fraction);

/// Coefficient of determination of `pred` against `truth`.
double r_squared(std::span<const double> pred, std::span<const double> truth);

/// Two-sample Kolmogorov-Smirnov statistic (sup distance between ECDFs).
double ks_distance(std::span<const double> a, std::span<const double> b);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

}  // namespace irisdeid
