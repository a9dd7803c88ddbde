#include "rohan/core.hpp"

#include <algorithm>
#include <cmath>

#include "rohan/errors.hpp"

namespace rohan {

bool bbox_valid(const BBox& b) {
    if (!(b.cx >= 0 && b.cx <= 1 && b.cy >= 0 && b.cy <= 1)) return false;
    if (!(b.w > 0 && b.w <= 1 && b.h > 0 && b.h <= 1)) return false;
    if (b.conf && !(*b.conf >= 0 && *b.conf <= 1)) return false;
    return b.class_id >= 0;
}

Rect to_rect(const BBox& b) {
    return {b.cx - b.w / 2, b.cy - b.h / 2, b.cx + b.w / 2, b.cy + b.h / 2};
}

double iou(const Rect& a, const Rect& b) {
    const double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (ix <= 0 || iy <= 0) return 0.0;
    const double inter = ix * iy;
    const double uni = (a.x1 - a.x0) * (a.y1 - a.y0) + (b.x1 - b.x0) * (b.y1 - b.y0) - inter;
    return inter / uni;
}

double iou(const BBox& a, const BBox& b) {
    return iou(to_rect(a), to_rect(b));
}

namespace {

int round_edge(double v, int limit) {
    return std::clamp(int(std::lround(v)), 0, limit);
}

}  // namespace

PixelBox to_pixel(const BBox& b, int width, int height) {
    if (width <= 0 || height <= 0)
        throw format_error("to_pixel: image dimensions must be positive");
    PixelBox p;
    p.x0 = round_edge((b.cx - b.w / 2) * width, width);
    p.x1 = round_edge((b.cx + b.w / 2) * width, width);
    p.y0 = round_edge((b.cy - b.h / 2) * height, height);
    p.y1 = round_edge((b.cy + b.h / 2) * height, height);
    // keep at least one pixel of extent
    if (p.x1 <= p.x0) {
        if (p.x0 == width) p.x0 = width - 1;
        p.x1 = p.x0 + 1;
    }
    if (p.y1 <= p.y0) {
        if (p.y0 == height) p.y0 = height - 1;
        p.y1 = p.y0 + 1;
    }
    return p;
}

BBox to_normalized(const PixelBox& p, int width, int height,
                   std::optional<double> conf, int class_id) {
    if (width <= 0 || height <= 0)
        throw format_error("to_normalized: image dimensions must be positive");
    if (p.x1 <= p.x0 || p.y1 <= p.y0)
        throw format_error("to_normalized: empty pixel box");
    BBox b;
    b.cx = (p.x0 + p.x1) / 2.0 / width;
    b.cy = (p.y0 + p.y1) / 2.0 / height;
    b.w = double(p.x1 - p.x0) / width;
    b.h = double(p.y1 - p.y0) / height;
    b.conf = conf;
    b.class_id = class_id;
    return b;
}

BBox clamp_to_unit(const BBox& b) {
    const double x0 = std::clamp(b.cx - b.w / 2, 0.0, 1.0);
    const double x1 = std::clamp(b.cx + b.w / 2, 0.0, 1.0);
    const double y0 = std::clamp(b.cy - b.h / 2, 0.0, 1.0);
    const double y1 = std::clamp(b.cy + b.h / 2, 0.0, 1.0);
    BBox out = b;
    out.cx = (x0 + x1) / 2;
    out.cy = (y0 + y1) / 2;
    out.w = x1 - x0;
    out.h = y1 - y0;
    return out;
}

}  // namespace rohan
