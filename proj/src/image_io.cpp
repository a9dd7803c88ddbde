#include "rohan/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "rohan/errors.hpp"

namespace fs = std::filesystem;

namespace rohan {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
    pixels.resize(std::size_t(w) * h * 3);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = fill[0];
        pixels[i + 1] = fill[1];
        pixels[i + 2] = fill[2];
    }
}

bool is_image_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    if (!fs::is_directory(dir)) throw io_error("no such directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return out;
}

RgbImage load_image(const std::filesystem::path& p) {
    cv::Mat bgr = cv::imread(p.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw io_error("cannot read image " + p.string());
    RgbImage img;
    img.width = bgr.cols;
    img.height = bgr.rows;
    img.pixels.resize(std::size_t(bgr.cols) * bgr.rows * 3);
    for (int y = 0; y < bgr.rows; ++y) {
        const std::uint8_t* row = bgr.ptr<std::uint8_t>(y);
        std::uint8_t* dst = img.at(0, y);
        for (int x = 0; x < bgr.cols; ++x) {
            dst[3 * x] = row[3 * x + 2];
            dst[3 * x + 1] = row[3 * x + 1];
            dst[3 * x + 2] = row[3 * x];
        }
    }
    return img;
}

BinaryMask load_mask(const std::filesystem::path& p) {
    cv::Mat gray = cv::imread(p.string(), cv::IMREAD_GRAYSCALE);
    if (gray.empty()) throw io_error("cannot read mask " + p.string());
    BinaryMask mask(gray.cols, gray.rows);
    for (int y = 0; y < gray.rows; ++y) {
        const std::uint8_t* row = gray.ptr<std::uint8_t>(y);
        for (int x = 0; x < gray.cols; ++x) mask.set(x, y, row[x] != 0);
    }
    return mask;
}

void save_image(const RgbImage& img, const std::filesystem::path& p, int jpeg_quality) {
    if (img.width <= 0 || img.height <= 0)
        throw internal_error("save_image: empty image");
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        std::uint8_t* row = bgr.ptr<std::uint8_t>(y);
        const std::uint8_t* src = img.at(0, y);
        for (int x = 0; x < img.width; ++x) {
            row[3 * x] = src[3 * x + 2];
            row[3 * x + 1] = src[3 * x + 1];
            row[3 * x + 2] = src[3 * x];
        }
    }
    std::vector<int> params;
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".jpg" || ext == ".jpeg")
        params = {cv::IMWRITE_JPEG_QUALITY, jpeg_quality};
    bool ok = false;
    try {
        ok = cv::imwrite(p.string(), bgr, params);
    } catch (const cv::Exception& e) {
        throw io_error("cannot write image " + p.string() + ": " + e.what());
    }
    if (!ok) throw io_error("cannot write image " + p.string());
}

}  // namespace rohan
