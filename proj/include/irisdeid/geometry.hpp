#pragma once

#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "irisdeid/image.hpp"

namespace irisdeid {

// Angle convention used throughout the library: pixel coordinates have x to
// the right and y downward, and an angle phi denotes the direction
// (cos phi, sin phi) in those coordinates. Ellipse::theta uses the same frame,
// so a ray angle and an ellipse rotation can be compared directly.

struct Ellipse {
    double h = 0.0;      // center x
    double k = 0.0;      // center y
    double a = 1.0;      // semi-axis along the rotated x axis, a >= b
    double b = 1.0;      // semi-axis along the rotated y axis
    double theta = 0.0;  // rotation, normalized to [-pi/2, pi/2)

    Point2 center() const { return {h, k}; }

    /// Implicit value ((R^-1 (p - c)).x / a)^2 + ((R^-1 (p - c)).y / b)^2; 1 on the boundary.
    double implicit(double x, double y) const;
    bool contains(double x, double y) const { return implicit(x, y) <= 1.0; }

    /// Swaps axes so that a >= b and wraps theta into [-pi/2, pi/2).
    /// Throws InvalidArgument for non-positive or non-finite axes.
    Ellipse normalized() const;
};

/// Distance t > 0 at which origin + t * (cos phi, sin phi) leaves the ellipse.
/// The origin must lie strictly inside the ellipse.
double ray_exit_distance(const Ellipse& e, Point2 origin, double phi);

/// Pixels of the given class set that have a 4-neighbour outside the set.
/// Row-major scan order. Out-of-image neighbours do not count.
std::vector<Point2> boundary_points(const SegMask& mask, std::initializer_list<Label> classes);
std::vector<Point2> boundary_points(const SegMask& mask, Label cls);

/// Pixel-crack midpoints between the class set and its complement: one point
/// at half-pixel offset for every (inside, outside) 4-neighbour pair.
std::vector<Point2> boundary_edge_points(const SegMask& mask, std::initializer_list<Label> classes);

/// Direct least-squares ellipse fit (Fitzgibbon, Pilu & Fisher, in the
/// numerically stable formulation of Halir & Flusser). Input is centered and
/// scaled before solving so the result does not depend on image coordinates.
Ellipse fit_ellipse(std::span<const Point2> points);

struct EyeEllipses {
    Ellipse pupil;
    Ellipse iris;
};

/// Fits the pupillary boundary (pupil vs. everything else) and the limbus
/// (outer boundary of iris + pupil) from crack-edge points of the mask.
EyeEllipses fit_eye_ellipses(const SegMask& mask);

struct Run {
    double start = 0.0;
    double end = 0.0;

    friend bool operator==(const Run&, const Run&) = default;
};

/// Per-ray geometry of the source eye, rays cast from the pupil center at
/// phi_j = 2*pi*j / n_theta.
struct RadialProfile {
    int n_theta = 0;
    Point2 origin;
    std::vector<double> pupil_extent;
    std::vector<double> iris_extent;
    std::vector<std::vector<Run>> visible_iris_runs;
    double max_radius = 0.0;  // R = max over rays of iris_extent

    double ray_angle(int j) const;

    /// Extents at an arbitrary angle, linearly interpolated between adjacent rays.
    std::pair<double, double> extents_at(double phi) const;
};

RadialProfile compute_radial_profile(const SegMask& mask, const Ellipse& pupil, const Ellipse& iris,
                                     int n_theta);

}  // namespace irisdeid
