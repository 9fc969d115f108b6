#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "irisdeid/error.hpp"

namespace irisdeid {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Row-major raster with a fixed size. Base for every per-pixel container in
/// the library; derived types add their own value invariants.
template <class T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width <= 0 || height <= 0) {
            throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }
    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width <= 0 || height <= 0) {
            throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw Error(ErrorCode::DimensionMismatch, "raster data length != width * height");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    template <class U>
    bool same_size(const Raster<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// 8-bit digital counts of one camera frame.
class GrayImage : public Raster<std::uint8_t> {
public:
    using Raster::Raster;
};

enum class Label : std::uint8_t {
    Background = 0,
    Sclera = 1,
    Iris = 2,
    Pupil = 3,
};

/// Per-pixel class map paired with a frame.
class SegMask : public Raster<Label> {
public:
    using Raster::Raster;

    /// Validates raw label bytes; anything outside {0,1,2,3} is rejected.
    static SegMask from_bytes(int width, int height, std::span<const std::uint8_t> bytes);
    std::vector<std::uint8_t> to_bytes() const;

    std::size_t count(Label label) const;
};

/// Per-pixel specular-reflection flag (nonzero = glint).
class GlintMask : public Raster<std::uint8_t> {
public:
    using Raster::Raster;

    bool is_set(int x, int y) const { return at(x, y) != 0; }
    std::size_t count() const;
};

template <class A, class B>
void require_same_size(const Raster<A>& a, const Raster<B>& b, const char* what) {
    if (!a.same_size(b)) {
        throw Error(ErrorCode::DimensionMismatch, what);
    }
}

}  // namespace irisdeid
