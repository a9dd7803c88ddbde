#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rohan {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB image, row-major, three bytes per pixel.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RgbImage() = default;
    RgbImage(int w, int h, Rgb fill = {0, 0, 0});

    std::uint8_t* at(int x, int y) {
        return pixels.data() + 3 * (std::size_t(y) * width + x);
    }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + 3 * (std::size_t(y) * width + x);
    }

    bool operator==(const RgbImage&) const = default;
};

}  // namespace rohan
