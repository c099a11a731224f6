#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dttm {

// Center-format axis-aligned box. The extent is the closed rectangle
// [x - w/2, x + w/2] x [y - h/2, y + h/2].
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 1.0;
    double h = 1.0;

    double left() const { return x - 0.5 * w; }
    double right() const { return x + 0.5 * w; }
    double top() const { return y - 0.5 * h; }
    double bottom() const { return y + 0.5 * h; }
    double area() const { return w * h; }

    bool operator==(const BBox&) const = default;
};

bool is_valid(const BBox& b);

// Throws dttm::Error when w or h is not positive or any field is not finite.
BBox make_bbox(double x, double y, double w, double h);

double iou(const BBox& a, const BBox& b);

// Row-major dense bit grid; one byte per pixel, values 0 or 1.
struct BitGrid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> bits;

    BitGrid() = default;
    BitGrid(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), bits(w * h, fill) {}

    std::uint8_t at(std::size_t row, std::size_t col) const { return bits[row * width + col]; }
    std::uint8_t& at(std::size_t row, std::size_t col) { return bits[row * width + col]; }

    bool operator==(const BitGrid&) const = default;
};

// Run-length encoded binary mask. Runs alternate 0-region / 1-region over the
// row-major scan, starting with the count of 0-pixels (which may be zero).
class BinaryMask {
public:
    // Upper bound on width * height accepted from untrusted input.
    static constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 28;

    BinaryMask() = default;
    // Validates dimensions and runs; throws dttm::Error on violation.
    BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint32_t> runs);

    static BinaryMask empty(std::size_t width, std::size_t height);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    const std::vector<std::uint32_t>& runs() const { return runs_; }

    std::size_t count() const;
    bool same_shape(const BinaryMask& other) const { return width_ == other.width_ && height_ == other.height_; }

    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint32_t> runs_;
};

BinaryMask rle_encode(const BitGrid& dense);
BitGrid rle_decode(const BinaryMask& mask);

// "width height r0 r1 ..." text form.
std::string to_rle_string(const BinaryMask& mask);
BinaryMask parse_rle_string(std::string_view text);

// 1.0 when both masks are empty. Throws ShapeError on dimension mismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Pixel (r, c) is set iff its center (c + 0.5, r + 0.5) lies in the closed box extent.
BinaryMask rasterize_box(const BBox& b, std::size_t width, std::size_t height);

} // namespace dttm
