#include "dttm/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "dttm/error.hpp"

namespace dttm {

namespace {

// Appends runs of alternating value, merging adjacent equal-valued pieces.
class RunBuilder {
public:
    void append(bool value, std::uint64_t length) {
        if (length == 0) return;
        if (runs_.empty()) {
            if (value) runs_.push_back(0);
            runs_.push_back(static_cast<std::uint32_t>(length));
            return;
        }
        const bool last_value = (runs_.size() - 1) % 2 == 1;
        if (last_value == value) {
            runs_.back() += static_cast<std::uint32_t>(length);
        } else {
            runs_.push_back(static_cast<std::uint32_t>(length));
        }
    }

    std::vector<std::uint32_t> finish(std::uint64_t total) {
        if (runs_.empty()) runs_.push_back(static_cast<std::uint32_t>(total));
        return std::move(runs_);
    }

private:
    std::vector<std::uint32_t> runs_;
};

// Iterates the [begin, end) pixel intervals covered by 1-runs.
struct OneIntervals {
    const std::vector<std::uint32_t>& runs;
    std::size_t index = 1;
    std::uint64_t offset = 0;

    explicit OneIntervals(const std::vector<std::uint32_t>& r) : runs(r) {
        if (!runs.empty()) offset = runs[0];
    }

    bool next(std::uint64_t& begin, std::uint64_t& end) {
        while (index < runs.size()) {
            begin = offset;
            end = offset + runs[index];
            offset = end + (index + 1 < runs.size() ? runs[index + 1] : 0);
            index += 2;
            if (end > begin) return true;
        }
        return false;
    }
};

} // namespace

bool is_valid(const BBox& b) {
    return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) && std::isfinite(b.h) && b.w > 0.0 &&
           b.h > 0.0;
}

BBox make_bbox(double x, double y, double w, double h) {
    BBox b{x, y, w, h};
    if (!is_valid(b)) throw Error("invalid box: width and height must be positive and all fields finite");
    return b;
}

double iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint32_t> runs)
    : width_(width), height_(height), runs_(std::move(runs)) {
    if (width_ == 0 || height_ == 0) throw Error("mask dimensions must be positive");
    const std::uint64_t total = static_cast<std::uint64_t>(width_) * height_;
    if (width_ > kMaxPixels || height_ > kMaxPixels || total > kMaxPixels) throw Error("mask too large");
    if (runs_.empty()) throw Error("mask has no runs");
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < runs_.size(); ++i) {
        if (i > 0 && runs_[i] == 0) throw Error("only the first run may be zero");
        sum += runs_[i];
    }
    if (sum != total) throw Error("run lengths sum to " + std::to_string(sum) + ", expected " + std::to_string(total));
}

BinaryMask BinaryMask::empty(std::size_t width, std::size_t height) {
    return BinaryMask(width, height, {static_cast<std::uint32_t>(width * height)});
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (std::size_t i = 1; i < runs_.size(); i += 2) n += runs_[i];
    return n;
}

BinaryMask rle_encode(const BitGrid& dense) {
    if (dense.bits.size() != dense.width * dense.height) throw ShapeError("bit grid is not rectangular");
    RunBuilder builder;
    std::size_t i = 0;
    while (i < dense.bits.size()) {
        const bool value = dense.bits[i] != 0;
        std::size_t j = i;
        while (j < dense.bits.size() && (dense.bits[j] != 0) == value) ++j;
        builder.append(value, j - i);
        i = j;
    }
    return BinaryMask(dense.width, dense.height, builder.finish(dense.bits.size()));
}

BitGrid rle_decode(const BinaryMask& mask) {
    BitGrid grid(mask.width(), mask.height());
    OneIntervals ones(mask.runs());
    std::uint64_t begin = 0, end = 0;
    while (ones.next(begin, end)) std::fill(grid.bits.begin() + begin, grid.bits.begin() + end, 1);
    return grid;
}

std::string to_rle_string(const BinaryMask& mask) {
    std::string out = std::to_string(mask.width()) + " " + std::to_string(mask.height());
    for (auto r : mask.runs()) {
        out += ' ';
        out += std::to_string(r);
    }
    return out;
}

BinaryMask parse_rle_string(std::string_view text) {
    std::vector<std::uint64_t> numbers;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] == ' ') {
            ++pos;
            continue;
        }
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc() || (ptr != text.data() + text.size() && *ptr != ' '))
            throw Error("malformed RLE string at offset " + std::to_string(pos));
        numbers.push_back(value);
        pos = static_cast<std::size_t>(ptr - text.data());
    }
    if (numbers.size() < 3) throw Error("RLE string needs width, height and at least one run");
    if (numbers[0] > BinaryMask::kMaxPixels || numbers[1] > BinaryMask::kMaxPixels)
        throw Error("mask dimensions out of range");
    std::vector<std::uint32_t> runs;
    runs.reserve(numbers.size() - 2);
    for (std::size_t i = 2; i < numbers.size(); ++i) {
        if (numbers[i] > std::numeric_limits<std::uint32_t>::max()) throw Error("run length out of range");
        runs.push_back(static_cast<std::uint32_t>(numbers[i]));
    }
    return BinaryMask(numbers[0], numbers[1], std::move(runs));
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw ShapeError("mask dimensions differ");
    const std::size_t count_a = a.count();
    const std::size_t count_b = b.count();
    if (count_a == 0 && count_b == 0) return 1.0;

    OneIntervals ia(a.runs()), ib(b.runs());
    std::uint64_t a0 = 0, a1 = 0, b0 = 0, b1 = 0;
    bool has_a = ia.next(a0, a1);
    bool has_b = ib.next(b0, b1);
    std::uint64_t inter = 0;
    while (has_a && has_b) {
        const auto lo = std::max(a0, b0);
        const auto hi = std::min(a1, b1);
        if (hi > lo) inter += hi - lo;
        if (a1 < b1) {
            has_a = ia.next(a0, a1);
        } else {
            has_b = ib.next(b0, b1);
        }
    }
    const double uni = static_cast<double>(count_a + count_b - inter);
    return static_cast<double>(inter) / uni;
}

BinaryMask rasterize_box(const BBox& b, std::size_t width, std::size_t height) {
    const std::uint64_t total = static_cast<std::uint64_t>(width) * height;
    // Pixel index i has center i + 0.5; it is inside [lo, hi] iff ceil(lo - 0.5) <= i <= floor(hi - 0.5).
    const double c0 = std::max(0.0, std::ceil(b.left() - 0.5));
    const double c1 = std::min(static_cast<double>(width) - 1.0, std::floor(b.right() - 0.5));
    const double r0 = std::max(0.0, std::ceil(b.top() - 0.5));
    const double r1 = std::min(static_cast<double>(height) - 1.0, std::floor(b.bottom() - 0.5));
    RunBuilder builder;
    if (!(c0 <= c1 && r0 <= r1)) {
        return BinaryMask(width, height, builder.finish(total));
    }
    const auto col_begin = static_cast<std::uint64_t>(c0);
    const auto col_end = static_cast<std::uint64_t>(c1) + 1;
    const auto row_begin = static_cast<std::uint64_t>(r0);
    const auto row_end = static_cast<std::uint64_t>(r1) + 1;
    builder.append(false, row_begin * width + col_begin);
    for (auto r = row_begin; r < row_end; ++r) {
        builder.append(true, col_end - col_begin);
        const std::uint64_t gap = (r + 1 < row_end) ? width - (col_end - col_begin) : width - col_end + (height - row_end) * width;
        builder.append(false, gap);
    }
    return BinaryMask(width, height, builder.finish(total));
}

} // namespace dttm
