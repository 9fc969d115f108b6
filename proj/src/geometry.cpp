#include "irisdeid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace irisdeid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool in_set(Label l, std::initializer_list<Label> classes) {
    return std::ranges::find(classes, l) != classes.end();
}

double wrap_half_turn(double theta) {
    // [-pi/2, pi/2)
    return theta - std::numbers::pi * std::floor((theta + std::numbers::pi / 2) / std::numbers::pi);
}

struct Conic {
    double A, B, C, D, E, F;
};

Ellipse conic_to_ellipse(Conic q) {
    const double det = 4.0 * q.A * q.C - q.B * q.B;
    if (!(det > 0.0)) {
        throw Error(ErrorCode::DegenerateFit, "conic is not an ellipse");
    }
    const double h = (q.B * q.E - 2.0 * q.C * q.D) / det;
    const double k = (q.B * q.D - 2.0 * q.A * q.E) / det;
    double f0 = q.A * h * h + q.B * h * k + q.C * k * k + q.D * h + q.E * k + q.F;
    double A = q.A, B = q.B, C = q.C;
    if (f0 > 0.0) {
        A = -A;
        B = -B;
        C = -C;
        f0 = -f0;
    }
    if (!(f0 < 0.0)) {
        throw Error(ErrorCode::DegenerateFit, "conic degenerates to a point");
    }
    Eigen::Matrix2d quad;
    quad << A, B / 2.0, B / 2.0, C;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(quad);
    const Eigen::Vector2d lambda = es.eigenvalues();  // ascending
    if (!(lambda(0) > 0.0)) {
        throw Error(ErrorCode::DegenerateFit, "conic is not an ellipse");
    }
    // Smallest eigenvalue belongs to the major axis.
    const Eigen::Vector2d major = es.eigenvectors().col(0);
    Ellipse e;
    e.h = h;
    e.k = k;
    e.a = std::sqrt(-f0 / lambda(0));
    e.b = std::sqrt(-f0 / lambda(1));
    e.theta = std::atan2(major(1), major(0));
    return e.normalized();
}

}  // namespace

double Ellipse::implicit(double x, double y) const {
    const double dx = x - h;
    const double dy = y - k;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double u = dx * c + dy * s;
    const double v = dy * c - dx * s;
    return u * u / (a * a) + v * v / (b * b);
}

Ellipse Ellipse::normalized() const {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(theta)) {
        throw Error(ErrorCode::InvalidArgument, "ellipse axes must be positive and finite");
    }
    Ellipse e = *this;
    if (e.a < e.b) {
        std::swap(e.a, e.b);
        e.theta += std::numbers::pi / 2;
    }
    e.theta = wrap_half_turn(e.theta);
    return e;
}

double ray_exit_distance(const Ellipse& e, Point2 origin, double phi) {
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    const double ox = origin.x - e.h;
    const double oy = origin.y - e.k;
    const double dx = std::cos(phi);
    const double dy = std::sin(phi);
    // Ray expressed in the ellipse's own axes.
    const double ux = ox * c + oy * s;
    const double uy = oy * c - ox * s;
    const double vx = dx * c + dy * s;
    const double vy = dy * c - dx * s;
    const double ia2 = 1.0 / (e.a * e.a);
    const double ib2 = 1.0 / (e.b * e.b);
    const double qa = vx * vx * ia2 + vy * vy * ib2;
    const double qb = 2.0 * (ux * vx * ia2 + uy * vy * ib2);
    const double qc = ux * ux * ia2 + uy * uy * ib2 - 1.0;
    if (!(qc < 0.0)) {
        throw Error(ErrorCode::GeometryInconsistent, "ray origin is not inside the ellipse");
    }
    const double disc = qb * qb - 4.0 * qa * qc;
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    const double t1 = q / qa;
    const double t2 = qc / q;
    return std::max(t1, t2);
}

std::vector<Point2> boundary_points(const SegMask& mask, std::initializer_list<Label> classes) {
    std::vector<Point2> out;
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!in_set(mask.at(x, y), classes)) continue;
            for (int n = 0; n < 4; ++n) {
                const int nx = x + dx[n];
                const int ny = y + dy[n];
                if (mask.contains(nx, ny) && !in_set(mask.at(nx, ny), classes)) {
                    out.push_back({static_cast<double>(x), static_cast<double>(y)});
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<Point2> boundary_points(const SegMask& mask, Label cls) {
    return boundary_points(mask, {cls});
}

std::vector<Point2> boundary_edge_points(const SegMask& mask, std::initializer_list<Label> classes) {
    std::vector<Point2> out;
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!in_set(mask.at(x, y), classes)) continue;
            for (int n = 0; n < 4; ++n) {
                const int nx = x + dx[n];
                const int ny = y + dy[n];
                if (mask.contains(nx, ny) && !in_set(mask.at(nx, ny), classes)) {
                    out.push_back({x + 0.5 * dx[n], y + 0.5 * dy[n]});
                }
            }
        }
    }
    return out;
}

Ellipse fit_ellipse(std::span<const Point2> points) {
    const std::size_t n = points.size();
    if (n < 5) {
        throw Error(ErrorCode::InsufficientPoints, "ellipse fit needs at least 5 points, got " + std::to_string(n));
    }

    // Center on the centroid and scale to unit RMS radius.
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& p : points) {
        ss += (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my);
    }
    const double scale = std::sqrt(ss / static_cast<double>(n));
    if (!(scale > 0.0)) {
        throw Error(ErrorCode::DegenerateFit, "all points coincide");
    }

    Eigen::Matrix3d s1 = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d s2 = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d s3 = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const double x = (p.x - mx) / scale;
        const double y = (p.y - my) / scale;
        const Eigen::Vector3d quad(x * x, x * y, y * y);
        const Eigen::Vector3d lin(x, y, 1.0);
        s1 += quad * quad.transpose();
        s2 += quad * lin.transpose();
        s3 += lin * lin.transpose();
    }

    Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::DegenerateFit, "points are collinear");
    }
    const Eigen::Matrix3d t = -lu.solve(s2.transpose());
    const Eigen::Matrix3d m = s1 + s2 * t;
    // Premultiply by the inverse of the ellipse constraint matrix.
    Eigen::Matrix3d reduced;
    reduced.row(0) = m.row(2) / 2.0;
    reduced.row(1) = -m.row(1);
    reduced.row(2) = m.row(0) / 2.0;

    Eigen::EigenSolver<Eigen::Matrix3d> es(reduced);
    int best = -1;
    double best_abs = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d v = es.eigenvectors().col(i).real();
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        const double lam = std::abs(es.eigenvalues()(i).real());
        if (cond > 0.0 && (best < 0 || lam < best_abs)) {
            best = i;
            best_abs = lam;
        }
    }
    if (best < 0) {
        throw Error(ErrorCode::DegenerateFit, "no elliptical solution");
    }
    const Eigen::Vector3d a1 = es.eigenvectors().col(best).real();
    const Eigen::Vector3d a2 = t * a1;

    Ellipse unit = conic_to_ellipse({a1(0), a1(1), a1(2), a2(0), a2(1), a2(2)});
    unit.h = unit.h * scale + mx;
    unit.k = unit.k * scale + my;
    unit.a *= scale;
    unit.b *= scale;
    return unit.normalized();
}

EyeEllipses fit_eye_ellipses(const SegMask& mask) {
    if (boundary_points(mask, Label::Iris).size() < 5) {
        throw Error(ErrorCode::InsufficientPoints, "fewer than 5 iris boundary pixels");
    }
    const auto pupil_pts = boundary_edge_points(mask, {Label::Pupil});
    const auto iris_pts = boundary_edge_points(mask, {Label::Iris, Label::Pupil});
    EyeEllipses out;
    out.pupil = fit_ellipse(pupil_pts);
    out.iris = fit_ellipse(iris_pts);
    if (!out.iris.contains(out.pupil.h, out.pupil.k)) {
        throw Error(ErrorCode::GeometryInconsistent, "pupil center lies outside the iris ellipse");
    }
    return out;
}

double RadialProfile::ray_angle(int j) const {
    return kTwoPi * static_cast<double>(j) / static_cast<double>(n_theta);
}

std::pair<double, double> RadialProfile::extents_at(double phi) const {
    const double u = phi / kTwoPi * n_theta;
    const double fl = std::floor(u);
    const double f = u - fl;
    int j0 = static_cast<int>(fl) % n_theta;
    if (j0 < 0) j0 += n_theta;
    const int j1 = (j0 + 1) % n_theta;
    return {pupil_extent[j0] + f * (pupil_extent[j1] - pupil_extent[j0]),
            iris_extent[j0] + f * (iris_extent[j1] - iris_extent[j0])};
}

RadialProfile compute_radial_profile(const SegMask& mask, const Ellipse& pupil, const Ellipse& iris,
                                     int n_theta) {
    if (n_theta < 8) {
        throw Error(ErrorCode::InvalidArgument, "n_theta must be >= 8");
    }
    RadialProfile p;
    p.n_theta = n_theta;
    p.origin = pupil.center();
    p.pupil_extent.resize(n_theta);
    p.iris_extent.resize(n_theta);
    p.visible_iris_runs.resize(n_theta);
    if (iris.implicit(p.origin.x, p.origin.y) >= 1.0) {
        throw Error(ErrorCode::GeometryInconsistent, "pupil center lies outside the iris ellipse");
    }
    for (int j = 0; j < n_theta; ++j) {
        const double phi = p.ray_angle(j);
        p.pupil_extent[j] = ray_exit_distance(pupil, p.origin, phi);
        p.iris_extent[j] = ray_exit_distance(iris, p.origin, phi);
        if (!(p.iris_extent[j] > p.pupil_extent[j])) {
            throw Error(ErrorCode::GeometryInconsistent,
                        "iris boundary inside pupil boundary along ray " + std::to_string(j));
        }
    }
    p.max_radius = *std::ranges::max_element(p.iris_extent);

    const int steps = static_cast<int>(std::floor(p.max_radius));
    for (int j = 0; j < n_theta; ++j) {
        const double phi = p.ray_angle(j);
        const double cx = std::cos(phi);
        const double cy = std::sin(phi);
        auto& runs = p.visible_iris_runs[j];
        bool open = false;
        for (int t = 0; t <= steps; ++t) {
            const int x = static_cast<int>(std::lround(p.origin.x + t * cx));
            const int y = static_cast<int>(std::lround(p.origin.y + t * cy));
            const bool iris_px = mask.contains(x, y) && mask.at(x, y) == Label::Iris;
            if (iris_px && !open) {
                runs.push_back({static_cast<double>(t), static_cast<double>(t)});
                open = true;
            } else if (iris_px) {
                runs.back().end = t;
            } else {
                open = false;
            }
        }
    }
    return p;
}

}  // namespace irisdeid
