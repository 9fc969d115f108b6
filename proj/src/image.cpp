#include "irisdeid/image.hpp"

#include <algorithm>
#include <string>

namespace irisdeid {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::GeometryInconsistent: return "GeometryInconsistent";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::AllGlint: return "AllGlint";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyAfterTrim: return "EmptyAfterTrim";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

SegMask SegMask::from_bytes(int width, int height, std::span<const std::uint8_t> bytes) {
    if (bytes.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::DimensionMismatch, "mask byte count != width * height");
    }
    std::vector<Label> labels(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] > 3) {
            throw Error(ErrorCode::InvalidArgument,
                        "mask label " + std::to_string(bytes[i]) + " outside {0,1,2,3}");
        }
        labels[i] = static_cast<Label>(bytes[i]);
    }
    return SegMask(width, height, std::move(labels));
}

std::vector<std::uint8_t> SegMask::to_bytes() const {
    std::vector<std::uint8_t> out(size());
    std::ranges::transform(data(), out.begin(), [](Label l) { return static_cast<std::uint8_t>(l); });
    return out;
}

std::size_t SegMask::count(Label label) const {
    return static_cast<std::size_t>(std::ranges::count(data(), label));
}

std::size_t GlintMask::count() const {
    return static_cast<std::size_t>(std::ranges::count_if(data(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace irisdeid
