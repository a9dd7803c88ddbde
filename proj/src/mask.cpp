#include "rohan/mask.hpp"

#include <algorithm>
#include <vector>

#include "rohan/errors.hpp"

namespace rohan {

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(size_t(width) * height, fill ? 1 : 0) {
    if (width <= 0 || height <= 0)
        throw internal_error("BinaryMask: dimensions must be positive");
}

size_t BinaryMask::count() const {
    size_t n = 0;
    for (uint8_t v : bits_) n += v != 0;
    return n;
}

std::optional<PixelBox> pixel_bbox_from_mask(const BinaryMask& mask) {
    int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return std::nullopt;
    return PixelBox{x0, y0, x1 + 1, y1 + 1};
}

std::optional<BBox> bbox_from_mask(const BinaryMask& mask) {
    auto p = pixel_bbox_from_mask(mask);
    if (!p) return std::nullopt;
    return to_normalized(*p, mask.width(), mask.height());
}

std::vector<PixelBox> connected_component_boxes(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    std::vector<int> label(size_t(w) * h, 0);
    std::vector<PixelBox> boxes;
    std::vector<std::pair<int, int>> stack;
    int next = 0;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!mask.at(sx, sy) || label[size_t(sy) * w + sx]) continue;
            ++next;
            PixelBox box{sx, sy, sx + 1, sy + 1};
            stack.clear();
            stack.emplace_back(sx, sy);
            label[size_t(sy) * w + sx] = next;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                box.x0 = std::min(box.x0, x);
                box.y0 = std::min(box.y0, y);
                box.x1 = std::max(box.x1, x + 1);
                box.y1 = std::max(box.y1, y + 1);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        if (!mask.at(nx, ny) || label[size_t(ny) * w + nx]) continue;
                        label[size_t(ny) * w + nx] = next;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            boxes.push_back(box);
        }
    }
    return boxes;
}

}  // namespace rohan
