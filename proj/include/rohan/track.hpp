#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rohan/core.hpp"

namespace rohan {

struct TrackerConfig {
    double iou_gate = 0.3;   // minimum IoU for a detection to extend a track
    int max_misses = 5;      // unmatched frames a track survives
    double min_conf = 0.25;  // detections below this never enter the tracker
};

enum class TrackState { active, lost, finished };
const char* to_string(TrackState s);

struct TrackObservation {
    int frame_idx = 0;
    BBox box;
};

struct Track {
    std::int64_t id = 0;  // unique positive id within one video
    std::vector<TrackObservation> observations;  // strictly increasing frame_idx
    TrackState state = TrackState::active;
    int misses = 0;  // consecutive unmatched frames
};

// Tracking by detection: constant-velocity prediction, IoU cost, exact
// assignment. Lost tracks keep their last predicted position frozen until
// they are re-matched or exceed max_misses.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg = {});

    // Advances one frame. Frames must arrive in strictly increasing
    // frame_idx order. Returns the track id for each input detection, 0
    // for detections below the confidence floor.
    std::vector<std::int64_t> step(const FrameDetections& frame);

    const std::vector<Track>& tracks() const { return tracks_; }

private:
    struct LiveState {
        std::size_t index = 0;  // into tracks_
        double vx = 0, vy = 0;  // center velocity per frame
        BBox predicted;
    };

    TrackerConfig cfg_;
    std::vector<Track> tracks_;
    std::vector<LiveState> live_;
    std::optional<int> last_frame_;
    std::int64_t next_id_ = 1;
};

// Every track ever created over the video, with full observation lists.
std::vector<Track> run_tracker(const std::vector<FrameDetections>& video,
                               const TrackerConfig& cfg = {});

}  // namespace rohan
