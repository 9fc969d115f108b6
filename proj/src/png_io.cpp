#include "irisdeid/png_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace irisdeid {

namespace {

cv::Mat read_raw(const std::filesystem::path& path, int flags) {
    cv::Mat m = cv::imread(path.string(), flags);
    if (m.empty()) {
        throw Error(ErrorCode::Io, "cannot read image " + path.string());
    }
    if (m.depth() != CV_8U) {
        throw Error(ErrorCode::Io, "expected 8-bit image: " + path.string());
    }
    return m;
}

void write_raw(const std::filesystem::path& path, int width, int height, const std::uint8_t* data) {
    // imwrite does not modify the buffer.
    const cv::Mat m(height, width, CV_8UC1, const_cast<std::uint8_t*>(data));
    const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6};
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m, params);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::Io, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
}

}  // namespace

GrayImage read_gray_png(const std::filesystem::path& path) {
    const cv::Mat m = read_raw(path, cv::IMREAD_GRAYSCALE);
    GrayImage img(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < m.cols; ++x) img.at(x, y) = row[x];
    }
    return img;
}

SegMask read_mask_png(const std::filesystem::path& path) {
    const cv::Mat m = read_raw(path, cv::IMREAD_UNCHANGED);
    if (m.channels() != 1) {
        throw Error(ErrorCode::Io, "mask must be single-channel: " + path.string());
    }
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(m.rows) * m.cols);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<std::uint8_t>(y);
        std::copy(row, row + m.cols, bytes.begin() + static_cast<std::ptrdiff_t>(y) * m.cols);
    }
    try {
        return SegMask::from_bytes(m.cols, m.rows, bytes);
    } catch (const Error& e) {
        throw Error(ErrorCode::Io, path.string() + ": " + e.what());
    }
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
    write_raw(path, img.width(), img.height(), img.data().data());
}

void write_png(const std::filesystem::path& path, const SegMask& mask) {
    const auto bytes = mask.to_bytes();
    write_raw(path, mask.width(), mask.height(), bytes.data());
}

}  // namespace irisdeid
