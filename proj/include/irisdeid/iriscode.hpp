#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irisdeid/geometry.hpp"
#include "irisdeid/image.hpp"

namespace irisdeid {

struct EncodingParams {
    int enc_n_r = 20;
    int enc_n_theta = 240;
    double wavelength = 18.0;   // px, centre wavelength of the log-Gabor filter
    double sigma_over_f = 0.5;  // bandwidth ratio
    int shift_range = 8;        // +- columns searched by the matcher

    void validate() const;
};

/// Phase-quadrant iris code: two bits per (row, col), real sign then imaginary
/// sign, plus one usability bit per (row, col).
class IrisCode {
public:
    IrisCode() = default;
    IrisCode(int rows, int cols);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    bool bit(int row, int col, int which) const { return bits_[bit_index(row, col, which)] != 0; }
    void set_bit(int row, int col, int which, bool v) { bits_[bit_index(row, col, which)] = v ? 1 : 0; }
    bool usable(int row, int col) const { return mask_[mask_index(row, col)] != 0; }
    void set_usable(int row, int col, bool v) { mask_[mask_index(row, col)] = v ? 1 : 0; }

    std::size_t usable_count() const;

    /// Column j of the result = column (j - shift) mod cols.
    IrisCode rotated(int shift) const;
    IrisCode complemented() const;

    /// Text dump: "rows cols", then one hex line per row of bits (2*cols bits,
    /// MSB first, zero padded), then one hex line per row of mask bits.
    void write_text(std::ostream& os) const;
    static IrisCode read_text(std::istream& is);

    friend bool operator==(const IrisCode&, const IrisCode&) = default;

private:
    std::size_t bit_index(int row, int col, int which) const {
        return (static_cast<std::size_t>(row) * cols_ + col) * 2 + which;
    }
    std::size_t mask_index(int row, int col) const { return static_cast<std::size_t>(row) * cols_ + col; }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> bits_;
    std::vector<std::uint8_t> mask_;
};

/// Log-Gabor transfer function sampled on an n-point DFT grid; zero for the DC
/// bin and all negative frequencies.
std::vector<double> log_gabor_filter(int n, double wavelength, double sigma_over_f);

/// Normalizes the iris at enc_n_r x enc_n_theta, filters each row circularly
/// with the 1D log-Gabor filter and quantizes the phase. A sample is usable
/// when it was sampled inside the image, is not a glint, lies on an iris pixel
/// and both filter components are outside [-1e-12, 1e-12].
IrisCode encode(const GrayImage& img, const SegMask& mask, const Ellipse& pupil, const Ellipse& iris,
                const EncodingParams& params, const GlintMask& glints);

struct MatchResult {
    double hd = 0.0;
    int best_shift = 0;
};

/// Fractional Hamming distance over jointly usable bits, minimized over column
/// shifts of `b` in [-shift_range, shift_range]. Ties go to the smaller |shift|,
/// then to the negative shift.
MatchResult hamming(const IrisCode& a, const IrisCode& b, int shift_range);

}  // namespace irisdeid
