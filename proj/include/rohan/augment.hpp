#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rohan/image.hpp"
#include "rohan/mask.hpp"

namespace rohan {

// Splatter synthesis parameters. The seed is mandatory so a run can be
// reproduced bit for bit.
struct BloodParams {
    std::uint64_t seed = 0;
    double density = 0.005;       // per-pixel seed probability
    double blur_sigma = 4.0;      // pixels
    double blob_threshold = 0.02; // cut on the blurred seed field
    int close_radius = 3;         // disk radius, merges nearby blobs
    int open_radius = 2;          // disk radius, removes specks
    Rgb color = {120, 10, 15};
    double opacity = 0.8;
};

struct GloveSpec {
    Rgb color = {235, 235, 235};
    double opacity = 0.5;
    std::optional<BloodParams> blood;
};

struct Palette {
    std::vector<GloveSpec> specs;
    double blood_probability = 0.5;  // chance an augmented image gets blood
};

// Sterile white, non-sterile blue, latex green; all with default blood.
Palette default_palette();
Palette load_palette(const std::filesystem::path& json_file);

// Separable gaussian, kernel radius ceil(3*sigma), clamp-to-edge borders.
std::vector<double> gaussian_blur(const std::vector<double>& field, int width, int height,
                                  double sigma);

// Binary morphology with a rasterized disk element (dx^2+dy^2 <= r^2);
// pixels outside the image are background.
BinaryMask dilate(const BinaryMask& m, int radius);
BinaryMask erode(const BinaryMask& m, int radius);
BinaryMask morph_close(const BinaryMask& m, int radius);  // dilate, then erode
BinaryMask morph_open(const BinaryMask& m, int radius);   // erode, then dilate

// Alpha-blends the glove color into the masked region; pixels outside the
// mask are untouched. Image and mask dimensions must agree.
RgbImage overlay_glove(const RgbImage& img, const BinaryMask& mask, const GloveSpec& spec);

// Deterministic splatter mask: seeded uniform noise, threshold at
// `density`, gaussian blur, threshold at `blob_threshold`, close, open,
// intersect with `mask`. The result is always a subset of `mask`.
BinaryMask synth_blood_mask(const BinaryMask& mask, const BloodParams& p);

RgbImage apply_blood(const RgbImage& img, const BinaryMask& blood, Rgb color, double opacity);

struct SkippedItem {
    std::string name;
    std::string reason;
};

struct AugmentSummary {
    long images = 0;
    long boxes = 0;
    std::vector<SkippedItem> skipped;
};

// Walks <in_root>/images with <in_root>/masks/<name>.png, writes augmented
// JPEGs and YOLO labels (one box per 8-connected mask component) under
// out_root. Glove choice, blood decision and blood seed derive from
// master_seed and the image name, so results do not depend on worker
// scheduling. Missing or unreadable inputs are recorded and skipped.
AugmentSummary augment_dataset(const std::filesystem::path& in_root,
                               const std::filesystem::path& out_root,
                               const Palette& palette,
                               std::uint64_t master_seed,
                               int threads = 1);

}  // namespace rohan
