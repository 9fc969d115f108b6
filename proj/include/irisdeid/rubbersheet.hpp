#pragma once

#include <cstdint>
#include <vector>

#include "irisdeid/geometry.hpp"
#include "irisdeid/image.hpp"

namespace irisdeid {

/// Rubber-sheet rectangle. Row 0 is the inner (pupil) boundary, the last row
/// the outer boundary; column j covers angle 2*pi*j / n_theta.
class UnwrappedIris {
public:
    UnwrappedIris() = default;
    UnwrappedIris(int n_r, int n_theta);

    int n_r() const noexcept { return n_r_; }
    int n_theta() const noexcept { return n_theta_; }

    double& value(int row, int col) { return values_[index(row, col)]; }
    double value(int row, int col) const { return values_[index(row, col)]; }
    bool valid(int row, int col) const { return valid_[index(row, col)] != 0; }
    void set_valid(int row, int col, bool v) { valid_[index(row, col)] = v ? 1 : 0; }

    std::size_t valid_count() const;

    friend bool operator==(const UnwrappedIris&, const UnwrappedIris&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_theta_) + static_cast<std::size_t>(col);
    }

    int n_r_ = 0;
    int n_theta_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> valid_;
};

/// Bilinear sample of the image at a real-valued position. Returns false when
/// the position lies outside [0, w-1] x [0, h-1].
bool bilinear(const GrayImage& img, double x, double y, double& out);

/// Maps the annulus between `inner` and `outer` to an n_r x n_theta rectangle.
/// Rays start at the inner ellipse's center; sample (i, j) lies at
/// (1 - r) P(phi) + r Q(phi) with r = i / (n_r - 1).
UnwrappedIris unwrap(const GrayImage& img, const Ellipse& inner, const Ellipse& outer, int n_r, int n_theta);

/// Resamples every column to new_n_r rows. Catmull-Rom when the input has at
/// least four rows, linear otherwise. End rows use linearly extrapolated ghost
/// samples, so linear profiles are reproduced exactly.
UnwrappedIris radial_resample(const UnwrappedIris& u, int new_n_r);

/// Output column j = input column (j - shift) mod n_theta.
UnwrappedIris rotate_columns(const UnwrappedIris& u, int shift);

struct PolarSample {
    double value = 0.0;
    bool valid = false;
};

/// Bilinear lookup at normalized radius r in [0, 1] and angle phi, wrapping in
/// angle. Valid only when all four neighbouring nodes are valid.
PolarSample sample(const UnwrappedIris& u, double r, double phi);

}  // namespace irisdeid
