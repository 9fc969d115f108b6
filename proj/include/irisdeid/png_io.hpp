#pragma once

#include <filesystem>

#include "irisdeid/image.hpp"

namespace irisdeid {

// 8-bit single-channel PNG. Read failures throw Error(Io); a multi-channel
// frame is converted to grayscale, a multi-channel mask is rejected.
GrayImage read_gray_png(const std::filesystem::path& path);
SegMask read_mask_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const GrayImage& img);
void write_png(const std::filesystem::path& path, const SegMask& mask);

}  // namespace irisdeid
