#include "rohan/refine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "rohan/errors.hpp"
#include "rohan/image_io.hpp"
#include "rohan/yolo.hpp"

namespace fs = std::filesystem;

namespace rohan {

FilterMode parse_filter_mode(const std::string& s) {
    if (s == "none") return FilterMode::none;
    if (s == "spatial") return FilterMode::spatial;
    if (s == "tracking") return FilterMode::tracking;
    throw usage_error("unknown filter mode '" + s + "' (none|spatial|tracking)");
}

const char* to_string(FilterMode m) {
    switch (m) {
        case FilterMode::none: return "none";
        case FilterMode::spatial: return "spatial";
        case FilterMode::tracking: return "tracking";
    }
    return "?";
}

namespace {

void check_params(const FilterParams& p) {
    if (p.window_len < 1) throw usage_error("filter: window_len must be >= 1");
    if (!(p.radius >= 0)) throw usage_error("filter: radius must be >= 0");
    if (p.min_track_len < 1) throw usage_error("filter: min_track_len must be >= 1");
    if (!(p.conf_floor >= 0 && p.conf_floor <= 1))
        throw usage_error("filter: conf_floor must be in [0,1]");
}

// Mean of every box center between video[lo] and video[hi] inclusive;
// false when the range holds no boxes at all.
bool window_mean(const std::vector<FrameDetections>& video, std::size_t lo, std::size_t hi,
                 double& mx, double& my) {
    double sx = 0, sy = 0;
    std::size_t n = 0;
    for (std::size_t k = lo; k <= hi; ++k) {
        for (const BBox& b : video[k].boxes) {
            sx += b.cx;
            sy += b.cy;
            ++n;
        }
    }
    if (n == 0) return false;
    mx = sx / double(n);
    my = sy / double(n);
    return true;
}

std::vector<BBox> keep_near(const std::vector<BBox>& boxes, double mx, double my,
                            double radius) {
    std::vector<BBox> out;
    for (const BBox& b : boxes)
        if (std::hypot(b.cx - mx, b.cy - my) <= radius) out.push_back(b);
    return out;
}

}  // namespace

std::vector<FrameDetections> spatial_filter(const std::vector<FrameDetections>& video,
                                            const FilterParams& p, WindowMode window) {
    check_params(p);
    std::vector<FrameDetections> out = video;
    const std::size_t n = video.size();
    const std::size_t w = std::size_t(p.window_len);
    if (window == WindowMode::tumbling) {
        for (std::size_t lo = 0; lo < n; lo += w) {
            const std::size_t hi = std::min(lo + w, n) - 1;
            double mx, my;
            if (!window_mean(video, lo, hi, mx, my)) continue;
            for (std::size_t k = lo; k <= hi; ++k)
                out[k].boxes = keep_near(video[k].boxes, mx, my, p.radius);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = i >= (w - 1) / 2 ? i - (w - 1) / 2 : 0;
            const std::size_t hi = std::min(i + w / 2, n - 1);
            double mx, my;
            if (!window_mean(video, lo, hi, mx, my)) continue;
            out[i].boxes = keep_near(video[i].boxes, mx, my, p.radius);
        }
    }
    return out;
}

std::vector<FrameDetections> track_length_filter(const std::vector<Track>& tracks,
                                                 const FilterParams& p) {
    check_params(p);
    std::map<int, std::vector<BBox>> frames;
    for (const Track& t : tracks) {
        if (t.observations.size() < std::size_t(p.min_track_len)) continue;
        for (const TrackObservation& obs : t.observations)
            frames[obs.frame_idx].push_back(obs.box);
    }
    std::vector<FrameDetections> out;
    out.reserve(frames.size());
    for (auto& [frame_idx, boxes] : frames) out.push_back({frame_idx, std::move(boxes)});
    return out;
}

std::vector<FrameDetections> apply_filter(const std::vector<FrameDetections>& video,
                                          const RefineOptions& opt) {
    check_params(opt.params);
    std::vector<FrameDetections> floored;
    floored.reserve(video.size());
    for (const FrameDetections& f : video) {
        FrameDetections g{f.frame_idx, {}};
        for (const BBox& b : f.boxes)
            if (b.conf.value_or(1.0) >= opt.params.conf_floor) g.boxes.push_back(b);
        floored.push_back(std::move(g));
    }
    switch (opt.mode) {
        case FilterMode::none:
            return floored;
        case FilterMode::spatial:
            return spatial_filter(floored, opt.params, opt.window);
        case FilterMode::tracking: {
            auto kept = track_length_filter(run_tracker(floored, opt.tracker), opt.params);
            std::map<int, std::vector<BBox>> by_frame;
            for (FrameDetections& f : kept) by_frame[f.frame_idx] = std::move(f.boxes);
            std::vector<FrameDetections> out;
            out.reserve(video.size());
            for (const FrameDetections& f : video) {
                auto it = by_frame.find(f.frame_idx);
                out.push_back({f.frame_idx, it == by_frame.end() ? std::vector<BBox>{}
                                                                 : std::move(it->second)});
            }
            return out;
        }
    }
    throw internal_error("apply_filter: bad mode");
}

PseudoDatasetInfo build_pseudo_dataset(const std::filesystem::path& frames_dir,
                                       const std::vector<FrameDetections>& predictions,
                                       const RefineOptions& opt,
                                       const std::filesystem::path& out_root) {
    const std::vector<fs::path> images = list_images(frames_dir);
    long total_in = 0;
    for (const FrameDetections& f : predictions) {
        total_in += long(f.boxes.size());
        if (f.frame_idx < 0 || std::size_t(f.frame_idx) >= images.size())
            throw io_error("no image in " + frames_dir.string() + " for frame " +
                           std::to_string(f.frame_idx));
    }

    const std::vector<FrameDetections> filtered = apply_filter(predictions, opt);
    fs::create_directories(out_root / "images");
    fs::create_directories(out_root / "labels");

    PseudoDatasetInfo info;
    info.root = out_root;
    for (const FrameDetections& f : filtered) {
        if (f.boxes.empty() && opt.drop_empty) continue;
        const fs::path& src = images[std::size_t(f.frame_idx)];
        fs::copy_file(src, out_root / "images" / (opt.prefix + src.filename().string()),
                      fs::copy_options::overwrite_existing);
        write_yolo_file(out_root / "labels" / (opt.prefix + src.stem().string() + ".txt"),
                        f.boxes, YoloKind::labels);
        ++info.frames;
        info.boxes_kept += long(f.boxes.size());
    }
    info.boxes_dropped = total_in - info.boxes_kept;
    write_provenance(out_root, opt, info.frames, info.boxes_kept, info.boxes_dropped);
    return info;
}

void write_provenance(const std::filesystem::path& out_root, const RefineOptions& opt,
                      long frames, long boxes_kept, long boxes_dropped) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["cycle"] = opt.cycle_idx;
    j["filter"] = {
        {"mode", to_string(opt.mode)},
        {"window", opt.window == WindowMode::sliding ? "sliding" : "tumbling"},
        {"window_len", opt.params.window_len},
        {"radius", opt.params.radius},
        {"min_track_len", opt.params.min_track_len},
        {"conf_floor", opt.params.conf_floor},
        {"drop_empty", opt.drop_empty},
        {"tracker",
         {{"iou_gate", opt.tracker.iou_gate},
          {"max_misses", opt.tracker.max_misses},
          {"min_conf", opt.tracker.min_conf}}},
    };
    j["frames"] = frames;
    j["boxes_kept"] = boxes_kept;
    j["boxes_dropped"] = boxes_dropped;
    std::ofstream out(out_root / "provenance.json", std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + (out_root / "provenance.json").string());
    out << j.dump(2) << '\n';
}

}  // namespace rohan
