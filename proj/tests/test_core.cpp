#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rohan/core.hpp"
#include "rohan/mask.hpp"
#include "support.hpp"

using rohan::BBox;
using rohan::PixelBox;
using rohan::Rect;

TEST_CASE("iou of identical boxes is 1") {
    Rect a{0, 0, 10, 10};
    CHECK(rohan::iou(a, a) == 1.0);
    BBox b{0.5, 0.5, 0.25, 0.25};
    CHECK(rohan::iou(b, b) == 1.0);
}

TEST_CASE("iou of disjoint and edge-touching boxes is 0") {
    CHECK(rohan::iou(Rect{0, 0, 10, 10}, Rect{20, 20, 30, 30}) == 0.0);
    CHECK(rohan::iou(Rect{0, 0, 10, 10}, Rect{10, 0, 20, 10}) == 0.0);
    BBox a{0.25, 0.5, 0.5, 0.5};
    BBox b{0.75, 0.5, 0.5, 0.5};
    CHECK(rohan::iou(a, b) == 0.0);
}

TEST_CASE("iou half-overlap example") {
    CHECK(rohan::iou(Rect{0, 0, 10, 10}, Rect{5, 0, 15, 10}) == 50.0 / 150.0);
}

TEST_CASE("iou is symmetric and within [0, 1]") {
    std::mt19937 rng(7);
    for (int i = 0; i < 500; ++i) {
        const BBox a = testsupport::random_box(rng, false);
        const BBox b = testsupport::random_box(rng, false);
        const double ab = rohan::iou(a, b);
        CHECK(ab == rohan::iou(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("iou matches cell counting for integer boxes") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> coord(0, 100);
    for (int i = 0; i < 300; ++i) {
        int ax0 = coord(rng), ax1 = coord(rng), ay0 = coord(rng), ay1 = coord(rng);
        int bx0 = coord(rng), bx1 = coord(rng), by0 = coord(rng), by1 = coord(rng);
        if (ax0 == ax1 || ay0 == ay1 || bx0 == bx1 || by0 == by1) continue;
        if (ax0 > ax1) std::swap(ax0, ax1);
        if (ay0 > ay1) std::swap(ay0, ay1);
        if (bx0 > bx1) std::swap(bx0, bx1);
        if (by0 > by1) std::swap(by0, by1);
        const double analytic =
            rohan::iou(Rect{double(ax0), double(ay0), double(ax1), double(ay1)},
                       Rect{double(bx0), double(by0), double(bx1), double(by1)});
        const double counted =
            testsupport::rasterized_iou(ax0, ay0, ax1, ay1, bx0, by0, bx1, by1);
        CHECK(analytic == counted);
    }
}

TEST_CASE("to_pixel maps the full-image box to the full image") {
    const PixelBox p = rohan::to_pixel(BBox{0.5, 0.5, 1.0, 1.0}, 640, 480);
    CHECK(p.x0 == 0);
    CHECK(p.y0 == 0);
    CHECK(p.x1 == 640);
    CHECK(p.y1 == 480);
}

TEST_CASE("to_pixel example on a 400x200 image") {
    const PixelBox p = rohan::to_pixel(BBox{0.5, 0.5, 0.25, 0.5}, 400, 200);
    CHECK(p.x0 == 150);
    CHECK(p.y0 == 50);
    CHECK(p.x1 == 250);
    CHECK(p.y1 == 150);
}

TEST_CASE("to_pixel never collapses a box to zero pixels") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        BBox b;
        b.cx = unit(rng);
        b.cy = unit(rng);
        b.w = unit(rng) * 0.01 + 1e-6;
        b.h = unit(rng) * 0.01 + 1e-6;
        b.cx = std::clamp(b.cx, b.w / 2, 1 - b.w / 2);
        b.cy = std::clamp(b.cy, b.h / 2, 1 - b.h / 2);
        const PixelBox p = rohan::to_pixel(b, 64, 48);
        CHECK(p.x1 > p.x0);
        CHECK(p.y1 > p.y0);
        CHECK(p.x0 >= 0);
        CHECK(p.y0 >= 0);
        CHECK(p.x1 <= 64);
        CHECK(p.y1 <= 48);
    }
}

TEST_CASE("to_normalized then to_pixel recovers the pixel box") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> coord(0, 319);
    for (int i = 0; i < 1000; ++i) {
        PixelBox p;
        p.x0 = coord(rng) % 320;
        p.y0 = coord(rng) % 240;
        p.x1 = p.x0 + 1 + coord(rng) % (320 - p.x0);
        p.y1 = p.y0 + 1 + coord(rng) % (240 - p.y0);
        const BBox b = rohan::to_normalized(p, 320, 240);
        const PixelBox back = rohan::to_pixel(b, 320, 240);
        CHECK(back.x0 == p.x0);
        CHECK(back.y0 == p.y0);
        CHECK(back.x1 == p.x1);
        CHECK(back.y1 == p.y1);
    }
}

TEST_CASE("pixel round trip stays within one pixel at 1920x1080") {
    std::mt19937 rng(19);
    for (int i = 0; i < 1000; ++i) {
        const BBox b = testsupport::random_box(rng, false);
        const BBox back = rohan::to_normalized(rohan::to_pixel(b, 1920, 1080), 1920, 1080);
        const double tol = 1.0 / 1080.0 + 1e-12;
        CHECK(std::abs(back.cx - b.cx) <= tol);
        CHECK(std::abs(back.cy - b.cy) <= tol);
        CHECK(std::abs(back.w - b.w) <= tol);
        CHECK(std::abs(back.h - b.h) <= tol);
    }
}

TEST_CASE("clamp_to_unit pulls boxes back inside the unit square") {
    BBox b{0.95, 0.5, 0.3, 0.2};
    const BBox c = rohan::clamp_to_unit(b);
    CHECK(c.cx + c.w / 2 <= 1.0 + 1e-12);
    CHECK(c.cx - c.w / 2 >= -1e-12);
    CHECK(c.w > 0.0);
    CHECK(c.cy == doctest::Approx(b.cy).epsilon(1e-12));
    CHECK(c.h == doctest::Approx(b.h).epsilon(1e-12));
    CHECK(rohan::bbox_valid(c));
}

TEST_CASE("bbox_valid rejects malformed boxes") {
    CHECK(rohan::bbox_valid(BBox{0.5, 0.5, 0.5, 0.5}));
    CHECK_FALSE(rohan::bbox_valid(BBox{0.5, 0.5, 0.0, 0.5}));
    CHECK_FALSE(rohan::bbox_valid(BBox{-0.1, 0.5, 0.2, 0.2}));
    CHECK_FALSE(rohan::bbox_valid(BBox{0.5, 0.5, 1.5, 0.2}));
    BBox with_conf{0.5, 0.5, 0.2, 0.2};
    with_conf.conf = 1.5;
    CHECK_FALSE(rohan::bbox_valid(with_conf));
    with_conf.conf = 1.0;
    CHECK(rohan::bbox_valid(with_conf));
}

TEST_CASE("bbox_from_mask on an empty mask is empty") {
    rohan::BinaryMask m(10, 10);
    CHECK_FALSE(rohan::bbox_from_mask(m).has_value());
}

TEST_CASE("bbox_from_mask of a single pixel") {
    rohan::BinaryMask m(10, 10);
    m.set(5, 5, true);
    const auto b = rohan::bbox_from_mask(m);
    REQUIRE(b.has_value());
    CHECK(b->cx == 0.55);
    CHECK(b->cy == 0.55);
    CHECK(b->w == 0.1);
    CHECK(b->h == 0.1);
}

TEST_CASE("bbox_from_mask of a filled block") {
    rohan::BinaryMask m(10, 10);
    for (int y = 2; y <= 7; ++y)
        for (int x = 3; x <= 8; ++x) m.set(x, y, true);
    const auto b = rohan::bbox_from_mask(m);
    REQUIRE(b.has_value());
    CHECK(b->cx == 0.6);
    CHECK(b->cy == 0.5);
    CHECK(b->w == 0.6);
    CHECK(b->h == 0.6);
}

TEST_CASE("bbox_from_mask box contains every set pixel") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> coord(0, 31);
    for (int trial = 0; trial < 100; ++trial) {
        rohan::BinaryMask m(32, 32);
        const int n = 1 + int(rng() % 40);
        for (int i = 0; i < n; ++i) m.set(coord(rng), coord(rng), true);
        const auto b = rohan::bbox_from_mask(m);
        REQUIRE(b.has_value());
        const PixelBox p = rohan::to_pixel(*b, 32, 32);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                if (m.at(x, y)) {
                    CHECK(x >= p.x0);
                    CHECK(x < p.x1);
                    CHECK(y >= p.y0);
                    CHECK(y < p.y1);
                }
    }
}

TEST_CASE("connected components merge diagonal neighbours") {
    rohan::BinaryMask m(8, 8);
    m.set(2, 2, true);
    m.set(3, 3, true);
    m.set(6, 6, true);
    const auto boxes = rohan::connected_component_boxes(m);
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0].x0 == 2);
    CHECK(boxes[0].y0 == 2);
    CHECK(boxes[0].x1 == 4);
    CHECK(boxes[0].y1 == 4);
    CHECK(boxes[1].x0 == 6);
    CHECK(boxes[1].y1 == 7);
}

TEST_CASE("connected components cover the mask exactly") {
    std::mt19937 rng(29);
    rohan::BinaryMask m(24, 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x) m.set(x, y, (rng() % 4) == 0);
    const auto boxes = rohan::connected_component_boxes(m);
    std::size_t covered = 0;
    for (const PixelBox& p : boxes) {
        bool any = false;
        for (int y = p.y0; y < p.y1; ++y)
            for (int x = p.x0; x < p.x1; ++x) any = any || m.at(x, y);
        CHECK(any);
    }
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x)
            if (m.at(x, y)) {
                bool inside = false;
                for (const PixelBox& p : boxes)
                    inside = inside ||
                             (x >= p.x0 && x < p.x1 && y >= p.y0 && y < p.y1);
                CHECK(inside);
                ++covered;
            }
    CHECK(covered == m.count());
}
