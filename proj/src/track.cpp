#include "rohan/track.hpp"

#include <limits>
#include <vector>

#include "rohan/assignment.hpp"
#include "rohan/errors.hpp"

namespace rohan {

const char* to_string(TrackState s) {
    switch (s) {
        case TrackState::active: return "active";
        case TrackState::lost: return "lost";
        case TrackState::finished: return "finished";
    }
    return "?";
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg) {
    if (!(cfg_.iou_gate >= 0 && cfg_.iou_gate <= 1))
        throw usage_error("tracker: iou_gate must be in [0,1]");
    if (cfg_.max_misses < 0) throw usage_error("tracker: max_misses must be >= 0");
    if (!(cfg_.min_conf >= 0 && cfg_.min_conf <= 1))
        throw usage_error("tracker: min_conf must be in [0,1]");
}

std::vector<std::int64_t> Tracker::step(const FrameDetections& frame) {
    if (last_frame_ && frame.frame_idx <= *last_frame_)
        throw format_error("tracker: frame " + std::to_string(frame.frame_idx) +
                           " arrived after frame " + std::to_string(*last_frame_));
    const int delta = last_frame_ ? frame.frame_idx - *last_frame_ : 0;
    last_frame_ = frame.frame_idx;

    // Move active predictions forward; lost tracks stay where their last
    // prediction put them.
    for (LiveState& ls : live_) {
        if (tracks_[ls.index].state != TrackState::active) continue;
        const BBox& last = tracks_[ls.index].observations.back().box;
        ls.predicted = last;
        ls.predicted.cx = last.cx + ls.vx * delta;
        ls.predicted.cy = last.cy + ls.vy * delta;
    }

    std::vector<std::int64_t> ids(frame.boxes.size(), 0);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < frame.boxes.size(); ++i)
        if (frame.boxes[i].conf.value_or(1.0) >= cfg_.min_conf) kept.push_back(i);

    std::vector<char> det_used(kept.size(), 0), live_used(live_.size(), 0);
    if (!kept.empty() && !live_.empty()) {
        std::vector<std::vector<double>> cost(kept.size(), std::vector<double>(live_.size()));
        for (std::size_t r = 0; r < kept.size(); ++r)
            for (std::size_t c = 0; c < live_.size(); ++c)
                cost[r][c] = 1.0 - iou(frame.boxes[kept[r]], live_[c].predicted);
        Matching m = assign(cost, 1.0 - cfg_.iou_gate);
        for (auto [r, c] : m.pairs) {
            det_used[r] = 1;
            live_used[c] = 1;
            LiveState& ls = live_[c];
            Track& t = tracks_[ls.index];
            const TrackObservation prev = t.observations.back();
            const BBox& box = frame.boxes[kept[r]];
            t.observations.push_back({frame.frame_idx, box});
            t.state = TrackState::active;
            t.misses = 0;
            const int span = frame.frame_idx - prev.frame_idx;
            ls.vx = (box.cx - prev.box.cx) / span;
            ls.vy = (box.cy - prev.box.cy) / span;
            ids[kept[r]] = t.id;
        }
    }

    // Unmatched live tracks age; past max_misses they are closed for good.
    std::vector<LiveState> still_live;
    for (std::size_t c = 0; c < live_.size(); ++c) {
        if (live_used[c]) {
            still_live.push_back(live_[c]);
            continue;
        }
        Track& t = tracks_[live_[c].index];
        ++t.misses;
        if (t.misses > cfg_.max_misses) {
            t.state = TrackState::finished;
        } else {
            t.state = TrackState::lost;
            still_live.push_back(live_[c]);
        }
    }
    live_ = std::move(still_live);

    for (std::size_t r = 0; r < kept.size(); ++r) {
        if (det_used[r]) continue;
        const BBox& box = frame.boxes[kept[r]];
        Track t;
        t.id = next_id_++;
        t.observations.push_back({frame.frame_idx, box});
        ids[kept[r]] = t.id;
        LiveState ls;
        ls.index = tracks_.size();
        ls.predicted = box;
        tracks_.push_back(std::move(t));
        live_.push_back(ls);
    }
    return ids;
}

std::vector<Track> run_tracker(const std::vector<FrameDetections>& video,
                               const TrackerConfig& cfg) {
    Tracker tracker(cfg);
    for (const FrameDetections& frame : video) tracker.step(frame);
    return tracker.tracks();
}

}  // namespace rohan
