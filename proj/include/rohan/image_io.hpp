#pragma once

#include <filesystem>
#include <vector>

#include "rohan/image.hpp"
#include "rohan/mask.hpp"

namespace rohan {

bool is_image_file(const std::filesystem::path& p);

// Image files directly inside `dir`, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

RgbImage load_image(const std::filesystem::path& p);

// 8-bit grayscale file; any nonzero pixel is foreground.
BinaryMask load_mask(const std::filesystem::path& p);

// Encodes by extension (.jpg/.jpeg with the given quality, .png lossless).
void save_image(const RgbImage& img, const std::filesystem::path& p, int jpeg_quality = 95);

}  // namespace rohan
