#include "irisdeid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace irisdeid {

IoUReport iou(const SegMask& pred, const SegMask& gt) {
    require_same_size(pred, gt, "prediction and ground-truth masks differ in size");
    std::array<std::size_t, 4> inter{};
    std::array<std::size_t, 4> uni{};
    const auto p = pred.data();
    const auto g = gt.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto pc = static_cast<std::size_t>(p[i]);
        const auto gc = static_cast<std::size_t>(g[i]);
        if (pc == gc) {
            ++inter[pc];
            ++uni[pc];
        } else {
            ++uni[pc];
            ++uni[gc];
        }
    }
    IoUReport out;
    double sum = 0.0;
    int present = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        if (uni[c] == 0) continue;
        const double v = static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
        out.per_class[c] = v;
        sum += v;
        ++present;
    }
    out.miou = present > 0 ? sum / present : 0.0;
    return out;
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) {
        throw Error(ErrorCode::LengthMismatch, "series lengths differ");
    }
    if (truth.empty()) return std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;
    for (double t : truth) mean += t;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (ss_tot == 0.0) {
        return ss_res == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
    }
    return 1.0 - ss_res / ss_tot;
}

CenterErrorReport center_errors(std::span<const Point2> pred, std::span<const Point2> gt) {
    if (pred.size() != gt.size()) {
        throw Error(ErrorCode::LengthMismatch, "prediction and ground-truth center lists differ in length");
    }
    CenterErrorReport out;
    out.n = pred.size();
    if (out.n == 0) return out;
    std::vector<double> px, py, gx, gy;
    for (std::size_t i = 0; i < out.n; ++i) {
        const double dx = pred[i].x - gt[i].x;
        const double dy = pred[i].y - gt[i].y;
        out.mse_x += dx * dx;
        out.mse_y += dy * dy;
        px.push_back(pred[i].x);
        py.push_back(pred[i].y);
        gx.push_back(gt[i].x);
        gy.push_back(gt[i].y);
    }
    out.mse_x /= static_cast<double>(out.n);
    out.mse_y /= static_cast<double>(out.n);
    out.r2_x = r_squared(px, gx);
    out.r2_y = r_squared(py, gy);
    return out;
}

double outlier_trimmed_mse(std::span<const double> errors, double trim_fraction) {
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
        throw Error(ErrorCode::InvalidArgument, "trim fraction must be in [0, 0.5)");
    }
    std::vector<double> mag(errors.size());
    std::ranges::transform(errors, mag.begin(), [](double e) { return std::abs(e); });
    std::ranges::sort(mag);
    const auto drop = static_cast<std::size_t>(std::ceil(trim_fraction * static_cast<double>(mag.size())));
    if (drop >= mag.size()) {
        throw Error(ErrorCode::EmptyAfterTrim, "no errors left after trimming");
    }
    const std::size_t keep = mag.size() - drop;
    double sum = 0.0;
    for (std::size_t i = 0; i < keep; ++i) sum += mag[i] * mag[i];
    return sum / static_cast<double>(keep);
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyRegion, "KS distance of an empty sample");
    }
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::ranges::sort(sa);
    std::ranges::sort(sb);
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= v) ++i;
        while (j < sb.size() && sb[j] <= v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd out;
    if (values.empty()) return out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size()));
    return out;
}

}  // namespace irisdeid
