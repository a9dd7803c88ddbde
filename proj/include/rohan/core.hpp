#pragma once

#include <optional>
#include <vector>

namespace rohan {

// Axis-aligned box in normalized image coordinates, YOLO convention:
// center plus size, everything in [0,1]. `conf` is present on detector
// output and absent on training labels.
struct BBox {
    double cx = 0;
    double cy = 0;
    double w = 0;
    double h = 0;
    std::optional<double> conf;
    int class_id = 0;
};

// Corner box in arbitrary units, [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

// Integer pixel box, half-open on both axes: covers columns [x0,x1) and
// rows [y0,y1).
struct PixelBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool operator==(const PixelBox&) const = default;
};

// Detections of one video frame; frame_idx is 0-based and unique within a
// video. An empty box list is a legal frame.
struct FrameDetections {
    int frame_idx = 0;
    std::vector<BBox> boxes;
};

bool bbox_valid(const BBox& b);

Rect to_rect(const BBox& b);

// Intersection over union. Boxes that merely touch (zero intersection
// area) give 0.
double iou(const Rect& a, const Rect& b);
double iou(const BBox& a, const BBox& b);

// Normalized <-> pixel conversion. to_pixel rounds edges to the nearest
// pixel boundary and keeps at least one pixel of extent, so a round trip
// moves each coordinate by at most one pixel quantum. Non-positive image
// dimensions are rejected.
PixelBox to_pixel(const BBox& b, int width, int height);
BBox to_normalized(const PixelBox& p, int width, int height,
                   std::optional<double> conf = std::nullopt, int class_id = 0);

// Clamps box edges into the unit square; the result keeps positive extent.
BBox clamp_to_unit(const BBox& b);

}  // namespace rohan
