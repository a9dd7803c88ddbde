#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rohan/eval.hpp"
#include "rohan/refine.hpp"

namespace rohan {

// One refinement run: detect -> filter pseudo-labels -> fine-tune, cycled.
// Detection and training are external commands; placeholders are
// substituted with shell-quoted paths.
struct PipelineConfig {
    std::filesystem::path run_dir;
    std::filesystem::path frames_source;  // one subdirectory per video
    std::string detect_cmd;               // {weights} {frames} {out}
    std::string train_cmd;                // {weights} {dataset} {out_weights} {epochs}
    int epochs_per_cycle = 5;
    int cycles = 1;
    std::filesystem::path initial_weights;
    std::optional<std::filesystem::path> eval_gt;  // images/ + labels/
    double eval_iou = 0.5;
    double sample_fps = 5;  // upstream frame-sampling rate, recorded only
    RefineOptions refine;
};

// Reads the JSON config; relative paths resolve against the file's
// directory. Validates ranges and placeholder completeness.
PipelineConfig load_pipeline_config(const std::filesystem::path& json_file);
void validate_config(const PipelineConfig& cfg);

struct DatasetStats {
    long frames = 0;
    long boxes_kept = 0;
    long boxes_dropped = 0;
};

struct CycleRecord {
    int cycle_idx = 0;
    DatasetStats stats;
    std::optional<EvalReport> eval;
    std::filesystem::path weights_in;   // relative to run_dir when inside it
    std::filesystem::path weights_ref;  // output weights of this cycle
    double wall_time_s = 0;
    std::string status = "ok";
    std::string error;
};

std::string substitute_placeholders(
    const std::string& tmpl,
    const std::vector<std::pair<std::string, std::string>>& values);

// (video name, frames directory) pairs under frames_source; a directory
// that itself contains images counts as a single video.
std::vector<std::pair<std::string, std::filesystem::path>> list_videos(
    const std::filesystem::path& frames_source);

// Runs detect_cmd for one frames directory, then checks that every frame
// image has a parseable prediction file. Returns the predictions directory.
std::filesystem::path run_detector(const PipelineConfig& cfg,
                                   const std::filesystem::path& weights,
                                   const std::filesystem::path& frames_dir,
                                   const std::filesystem::path& out_dir,
                                   const std::filesystem::path& log_dir);

CycleRecord run_cycle(const PipelineConfig& cfg, const std::filesystem::path& weights_in,
                      int cycle_idx);

// Folds run_cycle over cfg.cycles, chaining weights. With resume,
// completed cycles on disk are kept and the run continues after them. The
// deterministic per-cycle report is rewritten to <run_dir>/report.jsonl.
std::vector<CycleRecord> run_pipeline(const PipelineConfig& cfg, bool resume, std::ostream& log);

std::vector<CycleRecord> load_cycle_records(const std::filesystem::path& run_dir);
void write_report_csv(const std::vector<CycleRecord>& records, std::ostream& out);

}  // namespace rohan
