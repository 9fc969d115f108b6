#include "irisdeid/rubbersheet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace irisdeid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Snaps coordinates that are within rounding noise of a grid node.
double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
}

struct Tap {
    int index;
    double weight;
};

// Catmull-Rom taps for position s in [0, n-1], with ghost samples p[-1] and
// p[n] replaced by their linear extrapolations. Zero-weight taps are dropped.
int catmull_rom_taps(double s, int n, std::array<Tap, 8>& taps) {
    int i0 = static_cast<int>(std::floor(s));
    i0 = std::clamp(i0, 0, n - 2);
    const double t = s - i0;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double w[4] = {
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    };
    int count = 0;
    for (int m = 0; m < 4; ++m) {
        if (w[m] == 0.0) continue;
        const int idx = i0 - 1 + m;
        if (idx < 0) {
            taps[count++] = {0, 2.0 * w[m]};
            taps[count++] = {1, -w[m]};
        } else if (idx >= n) {
            taps[count++] = {n - 1, 2.0 * w[m]};
            taps[count++] = {n - 2, -w[m]};
        } else {
            taps[count++] = {idx, w[m]};
        }
    }
    return count;
}

int linear_taps(double s, int n, std::array<Tap, 8>& taps) {
    int i0 = std::clamp(static_cast<int>(std::floor(s)), 0, n - 2);
    const double t = s - i0;
    int count = 0;
    if (1.0 - t != 0.0) taps[count++] = {i0, 1.0 - t};
    if (t != 0.0) taps[count++] = {i0 + 1, t};
    return count;
}

}  // namespace

UnwrappedIris::UnwrappedIris(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 2 || n_theta < 8) {
        throw Error(ErrorCode::InvalidArgument, "unwrapped iris needs n_r >= 2 and n_theta >= 8");
    }
    values_.assign(static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta), 0.0);
    valid_.assign(values_.size(), 0);
}

std::size_t UnwrappedIris::valid_count() const {
    return static_cast<std::size_t>(std::ranges::count_if(valid_, [](std::uint8_t v) { return v != 0; }));
}

bool bilinear(const GrayImage& img, double x, double y, double& out) {
    if (!(x >= 0.0) || !(y >= 0.0) || x > img.width() - 1 || y > img.height() - 1) {
        return false;
    }
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
    const double bottom = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
    out = (1.0 - fy) * top + fy * bottom;
    return true;
}

UnwrappedIris unwrap(const GrayImage& img, const Ellipse& inner, const Ellipse& outer, int n_r, int n_theta) {
    UnwrappedIris u(n_r, n_theta);
    const Point2 c = inner.center();
    if (outer.implicit(c.x, c.y) >= 1.0) {
        throw Error(ErrorCode::GeometryInconsistent, "inner ellipse center outside outer ellipse");
    }
    for (int j = 0; j < n_theta; ++j) {
        const double phi = kTwoPi * j / n_theta;
        const double dx = std::cos(phi);
        const double dy = std::sin(phi);
        const double t_in = ray_exit_distance(inner, c, phi);
        const double t_out = ray_exit_distance(outer, c, phi);
        if (!(t_out > t_in)) {
            throw Error(ErrorCode::GeometryInconsistent, "inner ellipse not inside outer ellipse");
        }
        for (int i = 0; i < n_r; ++i) {
            const double r = static_cast<double>(i) / (n_r - 1);
            const double t = (1.0 - r) * t_in + r * t_out;
            double v = 0.0;
            if (bilinear(img, c.x + t * dx, c.y + t * dy, v)) {
                u.value(i, j) = v;
                u.set_valid(i, j, true);
            }
        }
    }
    return u;
}

UnwrappedIris radial_resample(const UnwrappedIris& u, int new_n_r) {
    if (new_n_r < 2) {
        throw Error(ErrorCode::InvalidArgument, "new_n_r must be >= 2");
    }
    const int n = u.n_r();
    const bool cubic = n >= 4;
    UnwrappedIris out(new_n_r, u.n_theta());
    std::array<Tap, 8> taps{};
    for (int k = 0; k < new_n_r; ++k) {
        const double s = static_cast<double>(k) * (n - 1) / (new_n_r - 1);
        const int count = cubic ? catmull_rom_taps(s, n, taps) : linear_taps(s, n, taps);
        for (int j = 0; j < u.n_theta(); ++j) {
            bool ok = true;
            double acc = 0.0;
            for (int m = 0; m < count; ++m) {
                ok = ok && u.valid(taps[m].index, j);
                acc += taps[m].weight * u.value(taps[m].index, j);
            }
            if (ok) {
                out.value(k, j) = std::clamp(acc, 0.0, 255.0);
                out.set_valid(k, j, true);
            }
        }
    }
    return out;
}

UnwrappedIris rotate_columns(const UnwrappedIris& u, int shift) {
    const int n = u.n_theta();
    UnwrappedIris out(u.n_r(), n);
    const int s = ((shift % n) + n) % n;
    for (int i = 0; i < u.n_r(); ++i) {
        for (int j = 0; j < n; ++j) {
            const int src = (j - s + n) % n;
            out.value(i, j) = u.value(i, src);
            out.set_valid(i, j, u.valid(i, src));
        }
    }
    return out;
}

PolarSample sample(const UnwrappedIris& u, double r, double phi) {
    const double rr = snap(std::clamp(r, 0.0, 1.0) * (u.n_r() - 1));
    const int r0 = std::min(static_cast<int>(std::floor(rr)), u.n_r() - 2);
    const double tr = rr - r0;

    const int n = u.n_theta();
    const double cc = snap(phi / kTwoPi * n);
    const double fl = std::floor(cc);
    const double tc = cc - fl;
    int c0 = static_cast<int>(std::fmod(fl, static_cast<double>(n)));
    if (c0 < 0) c0 += n;
    const int c1 = (c0 + 1) % n;

    PolarSample s;
    s.valid = u.valid(r0, c0) && u.valid(r0, c1) && u.valid(r0 + 1, c0) && u.valid(r0 + 1, c1);
    const double lo = (1.0 - tc) * u.value(r0, c0) + tc * u.value(r0, c1);
    const double hi = (1.0 - tc) * u.value(r0 + 1, c0) + tc * u.value(r0 + 1, c1);
    s.value = (1.0 - tr) * lo + tr * hi;
    return s;
}

}  // namespace irisdeid
