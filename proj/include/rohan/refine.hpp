#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rohan/core.hpp"
#include "rohan/track.hpp"

namespace rohan {

struct FilterParams {
    int window_len = 10;       // frames per spatial-filter block
    double radius = 0.35;      // allowed normalized distance from the block mean
    int min_track_len = 5;     // tracks with fewer observations are discarded
    double conf_floor = 0.25;  // pseudo-label confidence cutoff
};

enum class FilterMode { none, spatial, tracking };
enum class WindowMode { tumbling, sliding };

FilterMode parse_filter_mode(const std::string& s);
const char* to_string(FilterMode m);

// Drops boxes whose center lies farther than `radius` from the mean of all
// box centers in the surrounding window. Tumbling windows partition the
// frame list into consecutive blocks of window_len; sliding windows center
// a window of the same length on each frame.
std::vector<FrameDetections> spatial_filter(const std::vector<FrameDetections>& video,
                                            const FilterParams& p,
                                            WindowMode window = WindowMode::tumbling);

// Keeps observations of tracks with at least min_track_len entries,
// regrouped per frame. Frames left without boxes are omitted; boxes within
// a frame are ordered by track id.
std::vector<FrameDetections> track_length_filter(const std::vector<Track>& tracks,
                                                 const FilterParams& p);

struct RefineOptions {
    FilterParams params;
    FilterMode mode = FilterMode::none;
    WindowMode window = WindowMode::tumbling;
    TrackerConfig tracker;    // association settings for tracking mode
    bool drop_empty = false;  // skip frames left without boxes
    std::string prefix;       // prepended to output basenames
    int cycle_idx = 0;        // recorded in provenance
};

// conf_floor, then the configured filter mode, over one video's frames.
std::vector<FrameDetections> apply_filter(const std::vector<FrameDetections>& video,
                                          const RefineOptions& opt);

struct PseudoDatasetInfo {
    std::filesystem::path root;
    long frames = 0;
    long boxes_kept = 0;
    long boxes_dropped = 0;
};

// Filters `predictions` (frame_idx i pairs with the i-th image of
// frames_dir in filename order), copies the images and writes YOLO label
// files plus a provenance record under out_root. A predicted frame without
// an image file is fatal.
PseudoDatasetInfo build_pseudo_dataset(const std::filesystem::path& frames_dir,
                                       const std::vector<FrameDetections>& predictions,
                                       const RefineOptions& opt,
                                       const std::filesystem::path& out_root);

void write_provenance(const std::filesystem::path& out_root, const RefineOptions& opt,
                      long frames, long boxes_kept, long boxes_dropped);

}  // namespace rohan
