#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rohan/core.hpp"

namespace rohan {

// Per-pixel boolean grid, row-major, aligned to an image of equal size.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return bits_.empty(); }

    bool at(int x, int y) const { return bits_[std::size_t(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[std::size_t(y) * width_ + x] = v ? 1 : 0; }

    std::size_t count() const;  // foreground pixels

    const std::vector<std::uint8_t>& raw() const { return bits_; }
    std::vector<std::uint8_t>& raw() { return bits_; }

    bool operator==(const BinaryMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Tight pixel box around the foreground; nullopt for an all-background mask.
std::optional<PixelBox> pixel_bbox_from_mask(const BinaryMask& mask);
std::optional<BBox> bbox_from_mask(const BinaryMask& mask);

// Tight boxes of the 8-connected foreground components, ordered by each
// component's first pixel in scan order.
std::vector<PixelBox> connected_component_boxes(const BinaryMask& mask);

}  // namespace rohan
