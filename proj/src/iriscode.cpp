#include "irisdeid/iriscode.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "irisdeid/rubbersheet.hpp"

namespace irisdeid {

namespace {

constexpr double kZeroResponse = 1e-12;

std::string to_hex(const std::vector<bool>& bits) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        int nibble = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            nibble <<= 1;
            if (i + b < bits.size() && bits[i + b]) nibble |= 1;
        }
        out.push_back(kDigits[nibble]);
    }
    return out;
}

std::vector<bool> from_hex(const std::string& hex, std::size_t nbits) {
    if (hex.size() != (nbits + 3) / 4) {
        throw Error(ErrorCode::InvalidArgument, "iris code hex line has the wrong length");
    }
    std::vector<bool> bits(nbits);
    for (std::size_t i = 0; i < hex.size(); ++i) {
        const char c = hex[i];
        int v = 0;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw Error(ErrorCode::InvalidArgument, "invalid hex digit in iris code");
        for (int b = 0; b < 4; ++b) {
            const std::size_t idx = i * 4 + b;
            if (idx < nbits) bits[idx] = ((v >> (3 - b)) & 1) != 0;
        }
    }
    return bits;
}

}  // namespace

void EncodingParams::validate() const {
    if (enc_n_r < 1 || enc_n_theta < 16) {
        throw Error(ErrorCode::InvalidArgument, "encoding grid needs >= 1 row and >= 16 columns");
    }
    if (!(wavelength > 2.0)) throw Error(ErrorCode::InvalidArgument, "wavelength must be > 2");
    if (!(sigma_over_f > 0.0 && sigma_over_f < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "sigma_over_f must be in (0, 1)");
    }
    if (shift_range < 0) throw Error(ErrorCode::InvalidArgument, "shift_range must be >= 0");
}

IrisCode::IrisCode(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 16) {
        throw Error(ErrorCode::InvalidArgument, "iris code needs rows >= 1 and cols >= 16");
    }
    bits_.assign(static_cast<std::size_t>(rows) * cols * 2, 0);
    mask_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

std::size_t IrisCode::usable_count() const {
    return static_cast<std::size_t>(std::ranges::count_if(mask_, [](std::uint8_t m) { return m != 0; }));
}

IrisCode IrisCode::rotated(int shift) const {
    IrisCode out(rows_, cols_);
    const int s = ((shift % cols_) + cols_) % cols_;
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            const int src = (c - s + cols_) % cols_;
            out.set_bit(r, c, 0, bit(r, src, 0));
            out.set_bit(r, c, 1, bit(r, src, 1));
            out.set_usable(r, c, usable(r, src));
        }
    }
    return out;
}

IrisCode IrisCode::complemented() const {
    IrisCode out = *this;
    for (auto& b : out.bits_) b = b ? 0 : 1;
    return out;
}

void IrisCode::write_text(std::ostream& os) const {
    os << rows_ << ' ' << cols_ << '\n';
    for (int r = 0; r < rows_; ++r) {
        std::vector<bool> line;
        for (int c = 0; c < cols_; ++c) {
            line.push_back(bit(r, c, 0));
            line.push_back(bit(r, c, 1));
        }
        os << to_hex(line) << '\n';
    }
    for (int r = 0; r < rows_; ++r) {
        std::vector<bool> line;
        for (int c = 0; c < cols_; ++c) line.push_back(usable(r, c));
        os << to_hex(line) << '\n';
    }
}

IrisCode IrisCode::read_text(std::istream& is) {
    int rows = 0;
    int cols = 0;
    if (!(is >> rows >> cols)) {
        throw Error(ErrorCode::InvalidArgument, "iris code header must be 'rows cols'");
    }
    IrisCode code(rows, cols);
    std::string line;
    for (int r = 0; r < rows; ++r) {
        if (!(is >> line)) throw Error(ErrorCode::InvalidArgument, "truncated iris code bits");
        const auto bits = from_hex(line, static_cast<std::size_t>(cols) * 2);
        for (int c = 0; c < cols; ++c) {
            code.set_bit(r, c, 0, bits[2 * c]);
            code.set_bit(r, c, 1, bits[2 * c + 1]);
        }
    }
    for (int r = 0; r < rows; ++r) {
        if (!(is >> line)) throw Error(ErrorCode::InvalidArgument, "truncated iris code mask");
        const auto bits = from_hex(line, static_cast<std::size_t>(cols));
        for (int c = 0; c < cols; ++c) code.set_usable(r, c, bits[c]);
    }
    return code;
}

std::vector<double> log_gabor_filter(int n, double wavelength, double sigma_over_f) {
    std::vector<double> g(n, 0.0);
    const double f0 = 1.0 / wavelength;
    const double denom = 2.0 * std::log(sigma_over_f) * std::log(sigma_over_f);
    for (int k = 1; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) / n;
        const double l = std::log(f / f0);
        g[k] = std::exp(-(l * l) / denom);
    }
    return g;
}

IrisCode encode(const GrayImage& img, const SegMask& mask, const Ellipse& pupil, const Ellipse& iris,
                const EncodingParams& params, const GlintMask& glints) {
    params.validate();
    require_same_size(img, mask, "image and mask sizes differ");
    require_same_size(img, glints, "image and glint mask sizes differ");

    const int rows = params.enc_n_r;
    const int cols = params.enc_n_theta;
    // A single radial band sits on the pupil boundary.
    const UnwrappedIris u = unwrap(img, pupil, iris, std::max(rows, 2), cols);
    const std::vector<double> filter = log_gabor_filter(cols, params.wavelength, params.sigma_over_f);

    IrisCode code(rows, cols);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> signal(cols);
    std::vector<std::complex<double>> spectrum;
    std::vector<std::complex<double>> response;
    const Point2 c = pupil.center();
    for (int r = 0; r < rows; ++r) {
        double sum = 0.0;
        int n_valid = 0;
        for (int j = 0; j < cols; ++j) {
            if (u.valid(r, j)) {
                sum += u.value(r, j);
                ++n_valid;
            }
        }
        const double fill = n_valid > 0 ? sum / n_valid : 0.0;
        for (int j = 0; j < cols; ++j) signal[j] = u.valid(r, j) ? u.value(r, j) : fill;

        fft.fwd(spectrum, signal);
        for (int k = 0; k < cols; ++k) spectrum[k] *= filter[k];
        fft.inv(response, spectrum);

        const double rn = rows > 1 ? static_cast<double>(r) / (rows - 1) : 0.0;
        for (int j = 0; j < cols; ++j) {
            const double re = response[j].real();
            const double im = response[j].imag();
            code.set_bit(r, j, 0, re > 0.0);
            code.set_bit(r, j, 1, im > 0.0);

            const double phi = 2.0 * std::numbers::pi * j / cols;
            const double t_in = ray_exit_distance(pupil, c, phi);
            const double t_out = ray_exit_distance(iris, c, phi);
            const double t = (1.0 - rn) * t_in + rn * t_out;
            const int px = static_cast<int>(std::lround(c.x + t * std::cos(phi)));
            const int py = static_cast<int>(std::lround(c.y + t * std::sin(phi)));
            const bool on_iris = mask.contains(px, py) && mask.at(px, py) == Label::Iris;
            const bool not_glint = mask.contains(px, py) && !glints.is_set(px, py);
            const bool nonzero = std::abs(re) > kZeroResponse && std::abs(im) > kZeroResponse;
            code.set_usable(r, j, u.valid(r, j) && on_iris && not_glint && nonzero);
        }
    }
    if (code.usable_count() * 10 < static_cast<std::size_t>(rows) * cols) {
        throw Error(ErrorCode::EmptyRegion, "fewer than 10% of iris code samples are usable");
    }
    return code;
}

MatchResult hamming(const IrisCode& a, const IrisCode& b, int shift_range) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "iris codes have different dimensions");
    }
    if (shift_range < 0) throw Error(ErrorCode::InvalidArgument, "shift_range must be >= 0");

    MatchResult best;
    bool found = false;
    // Visit 0, -1, +1, -2, +2, ... so the first strict minimum wins ties.
    for (int step = 0; step <= 2 * shift_range; ++step) {
        const int s = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
        const int cols = a.cols();
        const int sh = ((s % cols) + cols) % cols;
        std::size_t differ = 0;
        std::size_t joint = 0;
        for (int r = 0; r < a.rows(); ++r) {
            for (int c = 0; c < cols; ++c) {
                const int src = (c - sh + cols) % cols;
                if (!a.usable(r, c) || !b.usable(r, src)) continue;
                ++joint;
                differ += (a.bit(r, c, 0) != b.bit(r, src, 0)) + (a.bit(r, c, 1) != b.bit(r, src, 1));
            }
        }
        if (joint == 0) continue;
        const double hd = static_cast<double>(differ) / (2.0 * static_cast<double>(joint));
        if (!found || hd < best.hd) {
            best = {hd, s};
            found = true;
        }
    }
    if (!found) {
        throw Error(ErrorCode::NoOverlap, "iris code masks never overlap");
    }
    return best;
}

}  // namespace irisdeid
