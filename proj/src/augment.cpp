#include "rohan/augment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rohan/errors.hpp"
#include "rohan/image_io.hpp"
#include "rohan/yolo.hpp"

namespace fs = std::filesystem;

namespace rohan {

namespace {

void check_blood(const BloodParams& p) {
    if (!(p.density >= 0 && p.density <= 1))
        throw usage_error("blood: density must be in [0,1]");
    if (!(p.blur_sigma >= 0)) throw usage_error("blood: blur_sigma must be >= 0");
    if (!(p.blob_threshold >= 0)) throw usage_error("blood: blob_threshold must be >= 0");
    if (p.close_radius < 0 || p.open_radius < 0)
        throw usage_error("blood: morphology radii must be >= 0");
    if (!(p.opacity >= 0 && p.opacity <= 1))
        throw usage_error("blood: opacity must be in [0,1]");
}

void check_palette(const Palette& pal) {
    if (pal.specs.empty()) throw usage_error("palette: needs at least one glove");
    if (!(pal.blood_probability >= 0 && pal.blood_probability <= 1))
        throw usage_error("palette: blood_probability must be in [0,1]");
    for (const GloveSpec& g : pal.specs) {
        if (!(g.opacity >= 0 && g.opacity <= 1))
            throw usage_error("palette: glove opacity must be in [0,1]");
        if (g.blood) check_blood(*g.blood);
    }
}

// Top 53 bits of the generator output, uniform in [0,1).
double unit_double(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-image seed; depends on the name, not on scheduling.
std::uint64_t image_seed(std::uint64_t master_seed, const std::string& stem) {
    return splitmix64(master_seed ^ (fnv1a(stem) + 0x9e3779b97f4a7c15ULL));
}

std::uint8_t blend(std::uint8_t in, std::uint8_t color, double opacity) {
    return std::uint8_t(std::llround(opacity * color + (1.0 - opacity) * in));
}

Rgb parse_color(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw usage_error(where + ": color must be [r,g,b]");
    Rgb c;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 255)
            throw usage_error(where + ": color channels must be integers in 0..255");
        c[i] = std::uint8_t(j[i].get<int>());
    }
    return c;
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end())
            throw usage_error(where + ": unknown key '" + key + "'");
    }
}

}  // namespace

Palette default_palette() {
    Palette pal;
    pal.specs.push_back({{235, 235, 235}, 0.5, BloodParams{}});  // sterile white
    pal.specs.push_back({{90, 140, 190}, 0.5, BloodParams{}});   // non-sterile blue
    pal.specs.push_back({{140, 190, 160}, 0.5, BloodParams{}});  // latex green
    return pal;
}

Palette load_palette(const std::filesystem::path& json_file) {
    std::ifstream in(json_file, std::ios::binary);
    if (!in) throw io_error("cannot open " + json_file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(json_file.string() + ": " + e.what());
    }
    const std::string where = json_file.string();
    reject_unknown(j, {"blood_probability", "gloves"}, where);
    Palette pal;
    pal.specs.clear();
    if (j.contains("blood_probability"))
        pal.blood_probability = j["blood_probability"].get<double>();
    if (!j.contains("gloves") || !j["gloves"].is_array())
        throw usage_error(where + ": 'gloves' must be an array");
    for (const auto& g : j["gloves"]) {
        reject_unknown(g, {"color", "opacity", "blood"}, where + ": glove");
        GloveSpec spec;
        if (g.contains("color")) spec.color = parse_color(g["color"], where + ": glove");
        if (g.contains("opacity")) spec.opacity = g["opacity"].get<double>();
        spec.blood.reset();
        if (g.contains("blood") && !g["blood"].is_null()) {
            const auto& b = g["blood"];
            reject_unknown(b,
                           {"density", "blur_sigma", "blob_threshold", "close_radius",
                            "open_radius", "color", "opacity"},
                           where + ": blood");
            BloodParams bp;
            if (b.contains("density")) bp.density = b["density"].get<double>();
            if (b.contains("blur_sigma")) bp.blur_sigma = b["blur_sigma"].get<double>();
            if (b.contains("blob_threshold")) bp.blob_threshold = b["blob_threshold"].get<double>();
            if (b.contains("close_radius")) bp.close_radius = b["close_radius"].get<int>();
            if (b.contains("open_radius")) bp.open_radius = b["open_radius"].get<int>();
            if (b.contains("color")) bp.color = parse_color(b["color"], where + ": blood");
            if (b.contains("opacity")) bp.opacity = b["opacity"].get<double>();
            spec.blood = bp;
        }
        pal.specs.push_back(spec);
    }
    check_palette(pal);
    return pal;
}

std::vector<double> gaussian_blur(const std::vector<double>& field, int width, int height,
                                  double sigma) {
    if (width <= 0 || height <= 0 || field.size() != std::size_t(width) * height)
        throw internal_error("gaussian_blur: field does not match dimensions");
    if (sigma <= 0) return field;
    const int radius = int(std::ceil(3 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(double(i) * i) / (2 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    std::vector<double> tmp(field.size()), out(field.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                const int sx = std::clamp(x + i, 0, width - 1);
                acc += kernel[i + radius] * field[std::size_t(y) * width + sx];
            }
            tmp[std::size_t(y) * width + x] = acc;
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                const int sy = std::clamp(y + i, 0, height - 1);
                acc += kernel[i + radius] * tmp[std::size_t(sy) * width + x];
            }
            out[std::size_t(y) * width + x] = acc;
        }
    }
    return out;
}

namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    return offsets;
}

}  // namespace

BinaryMask dilate(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    const auto offsets = disk_offsets(radius);
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            bool hit = false;
            for (auto [dx, dy] : offsets) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height()) continue;
                if (m.at(nx, ny)) {
                    hit = true;
                    break;
                }
            }
            out.set(x, y, hit);
        }
    }
    return out;
}

BinaryMask erode(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    const auto offsets = disk_offsets(radius);
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            bool all = true;
            for (auto [dx, dy] : offsets) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height() || !m.at(nx, ny)) {
                    all = false;
                    break;
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

BinaryMask morph_close(const BinaryMask& m, int radius) { return erode(dilate(m, radius), radius); }

BinaryMask morph_open(const BinaryMask& m, int radius) { return dilate(erode(m, radius), radius); }

RgbImage overlay_glove(const RgbImage& img, const BinaryMask& mask, const GloveSpec& spec) {
    if (img.width != mask.width() || img.height != mask.height())
        throw format_error("overlay: image and mask dimensions differ");
    RgbImage out = img;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!mask.at(x, y)) continue;
            std::uint8_t* px = out.at(x, y);
            for (int c = 0; c < 3; ++c) px[c] = blend(px[c], spec.color[c], spec.opacity);
        }
    }
    return out;
}

BinaryMask synth_blood_mask(const BinaryMask& mask, const BloodParams& p) {
    check_blood(p);
    const int w = mask.width(), h = mask.height();
    if (w <= 0 || h <= 0) throw internal_error("synth_blood_mask: empty mask");

    std::mt19937_64 rng(p.seed);
    std::vector<double> seeds(std::size_t(w) * h);
    for (double& v : seeds) v = unit_double(rng) < p.density ? 1.0 : 0.0;

    const std::vector<double> field = gaussian_blur(seeds, w, h, p.blur_sigma);
    BinaryMask blobs(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            blobs.set(x, y, field[std::size_t(y) * w + x] >= p.blob_threshold);

    blobs = morph_close(blobs, p.close_radius);
    blobs = morph_open(blobs, p.open_radius);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!mask.at(x, y)) blobs.set(x, y, false);
    return blobs;
}

RgbImage apply_blood(const RgbImage& img, const BinaryMask& blood, Rgb color, double opacity) {
    if (img.width != blood.width() || img.height != blood.height())
        throw format_error("blood: image and mask dimensions differ");
    RgbImage out = img;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!blood.at(x, y)) continue;
            std::uint8_t* px = out.at(x, y);
            for (int c = 0; c < 3; ++c) px[c] = blend(px[c], color[c], opacity);
        }
    }
    return out;
}

namespace {

struct ItemResult {
    bool written = false;
    long boxes = 0;
    std::string skip_reason;
};

ItemResult augment_one(const fs::path& image_path, const fs::path& masks_dir,
                       const fs::path& out_root, const Palette& palette,
                       std::uint64_t master_seed) {
    ItemResult res;
    const std::string stem = image_path.stem().string();
    const fs::path mask_path = masks_dir / (stem + ".png");
    if (!fs::exists(mask_path)) {
        res.skip_reason = "missing mask";
        return res;
    }
    RgbImage img;
    BinaryMask mask;
    try {
        img = load_image(image_path);
        mask = load_mask(mask_path);
    } catch (const Error& e) {
        res.skip_reason = e.what();
        return res;
    }
    if (img.width != mask.width() || img.height != mask.height()) {
        res.skip_reason = "mask size differs from image";
        return res;
    }

    std::mt19937_64 rng(image_seed(master_seed, stem));
    const GloveSpec& spec = palette.specs[rng() % palette.specs.size()];
    const bool with_blood = unit_double(rng) < palette.blood_probability && spec.blood;
    const std::uint64_t blood_seed = rng();

    RgbImage out = overlay_glove(img, mask, spec);
    if (with_blood) {
        BloodParams bp = *spec.blood;
        bp.seed = blood_seed;
        const BinaryMask blood = synth_blood_mask(mask, bp);
        out = apply_blood(out, blood, bp.color, bp.opacity);
    }

    std::vector<BBox> boxes;
    for (const PixelBox& pb : connected_component_boxes(mask))
        boxes.push_back(to_normalized(pb, img.width, img.height));

    save_image(out, out_root / "images" / (stem + ".jpg"));
    write_yolo_file(out_root / "labels" / (stem + ".txt"), boxes, YoloKind::labels);
    res.written = true;
    res.boxes = long(boxes.size());
    return res;
}

}  // namespace

AugmentSummary augment_dataset(const std::filesystem::path& in_root,
                               const std::filesystem::path& out_root,
                               const Palette& palette, std::uint64_t master_seed,
                               int threads) {
    check_palette(palette);
    if (threads < 1) throw usage_error("augment: threads must be >= 1");
    const fs::path images_dir = in_root / "images";
    const fs::path masks_dir = in_root / "masks";
    if (!fs::is_directory(images_dir))
        throw io_error("no images directory under " + in_root.string());
    if (!fs::is_directory(masks_dir))
        throw io_error("no masks directory under " + in_root.string());
    const std::vector<fs::path> items = list_images(images_dir);
    fs::create_directories(out_root / "images");
    fs::create_directories(out_root / "labels");

    std::vector<ItemResult> results(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            try {
                results[i] = augment_one(items[i], masks_dir, out_root, palette, master_seed);
            } catch (const std::exception& e) {
                results[i].written = false;
                results[i].skip_reason = e.what();
            }
        }
    };
    if (threads == 1 || items.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads, int(items.size()));
        pool.reserve(std::size_t(n));
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    AugmentSummary summary;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (results[i].written) {
            ++summary.images;
            summary.boxes += results[i].boxes;
        } else {
            summary.skipped.push_back({items[i].filename().string(), results[i].skip_reason});
        }
    }
    return summary;
}

}  // namespace rohan
