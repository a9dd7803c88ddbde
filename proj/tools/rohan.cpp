#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rohan/augment.hpp"
#include "rohan/errors.hpp"
#include "rohan/eval.hpp"
#include "rohan/json_io.hpp"
#include "rohan/pipeline.hpp"
#include "rohan/refine.hpp"
#include "rohan/track.hpp"
#include "rohan/yolo.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// "-" (or an empty destination) selects stdout.
void emit_json(const ordered_json& j, const std::string& dest) {
    if (dest.empty() || dest == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(dest, std::ios::binary | std::ios::trunc);
    if (!out) throw rohan::io_error("cannot write " + dest);
    out << j.dump(2) << '\n';
}

// An option that may appear bare (stdout) or with a file path.
CLI::Option* add_sink_option(CLI::App* cmd, const std::string& name, std::string& dest,
                             const std::string& desc) {
    return cmd->add_option(name, dest, desc)->expected(0, 1);
}

std::string sink_target(const CLI::App* cmd, const std::string& name, const std::string& dest) {
    return cmd->count(name) && dest.empty() ? "-" : dest;
}

fs::path require_dir(const std::string& p, const std::string& what) {
    if (!fs::is_directory(p)) throw rohan::io_error(what + " directory not found: " + p);
    return fs::path(p);
}

// Per-frame prediction files, sorted by name; the position in the sorted
// order becomes the frame index.
std::vector<rohan::FrameDetections> load_prediction_dir(const fs::path& dir) {
    std::vector<rohan::FrameDetections> video;
    int idx = 0;
    for (const auto& [stem, path] : rohan::list_label_files(dir))
        video.push_back({idx++, rohan::load_yolo_file(path, rohan::YoloKind::predictions)});
    return video;
}

ordered_json box_json(int frame_idx, const rohan::BBox& b) {
    ordered_json j;
    j["frame"] = frame_idx;
    j["cx"] = b.cx;
    j["cy"] = b.cy;
    j["w"] = b.w;
    j["h"] = b.h;
    if (b.conf) j["conf"] = *b.conf;
    return j;
}

struct TrackArgs {
    std::string pred;
    std::string out;
    rohan::TrackerConfig cfg;
};

int run_track(const TrackArgs& a) {
    const auto tracks =
        rohan::run_tracker(load_prediction_dir(require_dir(a.pred, "prediction")), a.cfg);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!a.out.empty() && a.out != "-") {
        file.open(a.out, std::ios::binary | std::ios::trunc);
        if (!file) throw rohan::io_error("cannot write " + a.out);
        out = &file;
    }
    for (const rohan::Track& t : tracks) {
        ordered_json j;
        j["id"] = t.id;
        j["state"] = rohan::to_string(t.state);
        j["start"] = t.observations.front().frame_idx;
        j["end"] = t.observations.back().frame_idx;
        j["length"] = t.observations.size();
        ordered_json boxes = ordered_json::array();
        for (const rohan::TrackObservation& obs : t.observations)
            boxes.push_back(box_json(obs.frame_idx, obs.box));
        j["boxes"] = std::move(boxes);
        *out << j.dump() << '\n';
    }
    if (out == &file && !file) throw rohan::io_error("failed writing " + a.out);
    return 0;
}

void print_eval(const rohan::EvalReport& r) {
    std::cout << "precision " << r.precision << "\n"
              << "recall    " << r.recall << "\n"
              << "mAP50     " << r.map50 << "\n"
              << "op_conf   " << r.op_conf << "\n"
              << "tp " << r.tp << "  fp " << r.fp << "  fn " << r.fn << "  (gt " << r.n_gt
              << ", pred " << r.n_pred << ")\n";
}

void add_filter_options(CLI::App* cmd, rohan::RefineOptions& opt, std::string& mode) {
    cmd->add_option("--window", opt.params.window_len, "spatial filter window length in frames");
    cmd->add_option("--radius", opt.params.radius,
                    "allowed normalized distance from the window mean");
    cmd->add_option("--min-track", opt.params.min_track_len,
                    "minimum observations for a track to survive");
    cmd->add_option("--conf-floor", opt.params.conf_floor, "drop boxes below this confidence");
    cmd->add_flag("--sliding", [&opt](std::size_t) { opt.window = rohan::WindowMode::sliding; },
                  "slide the spatial window instead of tumbling");
    cmd->add_flag("--drop-empty", opt.drop_empty, "skip frames left without boxes");
    cmd->add_option("--iou-gate", opt.tracker.iou_gate, "minimum IoU to extend a track");
    cmd->add_option("--max-misses", opt.tracker.max_misses,
                    "unmatched frames before a track is closed");
    cmd->add_option("--min-conf", opt.tracker.min_conf, "tracker detection confidence floor");
    cmd->add_option("--filter-mode,--mode", mode, "none, spatial or tracking");
}

int dispatch(int argc, char** argv) {
    CLI::App app{
        "hand-detection dataset toolkit: glove augmentation, tracking, "
        "pseudo-label refinement, metrics and pipeline orchestration"};
    app.require_subcommand(1);

    // --- augment ---------------------------------------------------------
    auto* augment = app.add_subcommand(
        "augment", "overlay glove colors and blood splatter on a masked hand dataset");
    std::string aug_in, aug_out, aug_palette, aug_json;
    std::uint64_t aug_seed = 0;
    int aug_threads = 1;
    augment->add_option("--in", aug_in, "dataset root with images/ and masks/")->required();
    augment->add_option("--out", aug_out, "output root for images/ and labels/")->required();
    augment->add_option("--palette", aug_palette, "palette JSON (default: built-in colors)");
    augment->add_option("--seed", aug_seed, "master seed for glove/blood choices");
    augment->add_option("--threads", aug_threads, "parallel image workers");
    add_sink_option(augment, "--json", aug_json, "write the summary as JSON ('-' = stdout)");
    augment->callback([&] {
        require_dir(aug_in, "input");
        const rohan::Palette palette = aug_palette.empty()
                                           ? rohan::default_palette()
                                           : rohan::load_palette(aug_palette);
        const rohan::AugmentSummary s =
            rohan::augment_dataset(aug_in, aug_out, palette, aug_seed, aug_threads);
        if (augment->count("--json")) {
            ordered_json j;
            j["schema_version"] = rohan::kSchemaVersion;
            j["images"] = s.images;
            j["boxes"] = s.boxes;
            j["skipped"] = ordered_json::array();
            for (const rohan::SkippedItem& item : s.skipped)
                j["skipped"].push_back({{"name", item.name}, {"reason", item.reason}});
            emit_json(j, sink_target(augment, "--json", aug_json));
        } else {
            std::cout << "augmented " << s.images << " images, " << s.boxes << " boxes\n";
            for (const rohan::SkippedItem& item : s.skipped)
                std::cout << "skipped " << item.name << ": " << item.reason << "\n";
        }
    });

    // --- track ------------------------------------------------------------
    auto* track = app.add_subcommand(
        "track", "link per-frame detections into tracks, one JSON record per line");
    TrackArgs ta;
    track->add_option("--pred", ta.pred, "directory of per-frame YOLO prediction files")
        ->required();
    track->add_option("--out", ta.out, "tracks.jsonl destination ('-' = stdout)");
    track->add_option("--iou-gate", ta.cfg.iou_gate, "minimum IoU to extend a track");
    track->add_option("--max-misses", ta.cfg.max_misses,
                      "unmatched frames before a track is closed");
    track->add_option("--min-conf", ta.cfg.min_conf, "detection confidence floor");
    track->callback([&] { run_track(ta); });

    // --- refine ------------------------------------------------------------
    auto* refine = app.add_subcommand(
        "refine", "filter predictions into a pseudo-label training dataset");
    std::string ref_frames, ref_pred, ref_out, ref_mode = "none", ref_json;
    rohan::RefineOptions ref_opt;
    refine->add_option("--frames", ref_frames, "frame images of one video")->required();
    refine->add_option("--pred", ref_pred, "per-frame YOLO predictions for those frames")
        ->required();
    refine->add_option("--out", ref_out, "output dataset root")->required();
    refine->add_option("--prefix", ref_opt.prefix, "basename prefix for emitted files");
    add_filter_options(refine, ref_opt, ref_mode);
    add_sink_option(refine, "--json", ref_json, "write the summary as JSON ('-' = stdout)");
    refine->callback([&] {
        ref_opt.mode = rohan::parse_filter_mode(ref_mode);
        const fs::path frames_dir = require_dir(ref_frames, "frames");
        const auto preds = load_prediction_dir(require_dir(ref_pred, "prediction"));
        const rohan::PseudoDatasetInfo info =
            rohan::build_pseudo_dataset(frames_dir, preds, ref_opt, ref_out);
        if (refine->count("--json")) {
            ordered_json j;
            j["schema_version"] = rohan::kSchemaVersion;
            j["out"] = info.root.generic_string();
            j["frames"] = info.frames;
            j["boxes_kept"] = info.boxes_kept;
            j["boxes_dropped"] = info.boxes_dropped;
            emit_json(j, sink_target(refine, "--json", ref_json));
        } else {
            std::cout << "wrote " << info.frames << " frames, " << info.boxes_kept
                      << " boxes kept, " << info.boxes_dropped << " dropped -> "
                      << info.root.string() << "\n";
        }
    });

    // --- eval --------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "precision / recall / mAP50 of predictions vs labels");
    std::string ev_pred, ev_gt, ev_json;
    double ev_iou = 0.5;
    std::optional<double> ev_conf;
    bool ev_no_curve = false;
    eval->add_option("--pred", ev_pred, "predictions root (files with confidence)")->required();
    eval->add_option("--gt", ev_gt, "ground-truth labels root")->required();
    eval->add_option("--iou", ev_iou, "IoU threshold for a match");
    eval->add_option("--conf", ev_conf,
                     "report precision/recall at this confidence instead of max-F1");
    eval->add_flag("--no-curve", ev_no_curve, "omit the PR curve from JSON output");
    add_sink_option(eval, "--json", ev_json, "write the report as JSON ('-' = stdout)");
    eval->callback([&] {
        const rohan::EvalReport r = rohan::evaluate(require_dir(ev_pred, "prediction"),
                                                    require_dir(ev_gt, "ground-truth"), ev_iou,
                                                    ev_conf);
        if (eval->count("--json"))
            emit_json(rohan::eval_report_json(r, !ev_no_curve),
                      sink_target(eval, "--json", ev_json));
        else
            print_eval(r);
    });

    // --- pipeline ------------------------------------------------------------
    auto* pipeline = app.add_subcommand(
        "pipeline", "iterate detect -> filter -> fine-tune with external commands");
    std::string pl_config;
    bool pl_resume = false;
    std::string pl_run_dir, pl_frames, pl_detect, pl_train, pl_weights, pl_eval_gt, pl_mode;
    std::optional<int> pl_epochs, pl_cycles;
    std::optional<double> pl_eval_iou, pl_fps;
    rohan::RefineOptions pl_filter;
    pipeline->add_option("--config", pl_config, "pipeline config JSON")->required();
    pipeline->add_flag("--resume", pl_resume, "continue an interrupted run");
    pipeline->add_option("--run_dir,--run-dir", pl_run_dir, "override: run directory");
    pipeline->add_option("--frames_source,--frames-source", pl_frames,
                         "override: frame directories root");
    pipeline->add_option("--detect_cmd,--detect-cmd", pl_detect, "override: detector template");
    pipeline->add_option("--train_cmd,--train-cmd", pl_train, "override: trainer template");
    pipeline->add_option("--epochs_per_cycle,--epochs-per-cycle", pl_epochs,
                         "override: epochs per fine-tune");
    pipeline->add_option("--cycles", pl_cycles, "override: refinement cycles");
    pipeline->add_option("--initial_weights,--initial-weights", pl_weights,
                         "override: starting weights file");
    pipeline->add_option("--eval_gt,--eval-gt", pl_eval_gt, "override: labeled test set root");
    pipeline->add_option("--eval_iou,--eval-iou", pl_eval_iou, "override: evaluation IoU");
    pipeline->add_option("--sample_fps,--sample-fps", pl_fps,
                         "override: documented frame sampling rate");
    add_filter_options(pipeline, pl_filter, pl_mode);
    pipeline->callback([&] {
        rohan::PipelineConfig cfg = rohan::load_pipeline_config(pl_config);
        if (!pl_run_dir.empty()) cfg.run_dir = fs::path(pl_run_dir);
        if (!pl_frames.empty()) cfg.frames_source = fs::path(pl_frames);
        if (!pl_detect.empty()) cfg.detect_cmd = pl_detect;
        if (!pl_train.empty()) cfg.train_cmd = pl_train;
        if (pl_epochs) cfg.epochs_per_cycle = *pl_epochs;
        if (pl_cycles) cfg.cycles = *pl_cycles;
        if (!pl_weights.empty()) cfg.initial_weights = fs::path(pl_weights);
        if (!pl_eval_gt.empty()) cfg.eval_gt = fs::path(pl_eval_gt);
        if (pl_eval_iou) cfg.eval_iou = *pl_eval_iou;
        if (pl_fps) cfg.sample_fps = *pl_fps;
        if (!pl_mode.empty()) cfg.refine.mode = rohan::parse_filter_mode(pl_mode);
        if (pipeline->count("--window"))
            cfg.refine.params.window_len = pl_filter.params.window_len;
        if (pipeline->count("--radius")) cfg.refine.params.radius = pl_filter.params.radius;
        if (pipeline->count("--min-track"))
            cfg.refine.params.min_track_len = pl_filter.params.min_track_len;
        if (pipeline->count("--conf-floor"))
            cfg.refine.params.conf_floor = pl_filter.params.conf_floor;
        if (pipeline->count("--iou-gate"))
            cfg.refine.tracker.iou_gate = pl_filter.tracker.iou_gate;
        if (pipeline->count("--max-misses"))
            cfg.refine.tracker.max_misses = pl_filter.tracker.max_misses;
        if (pipeline->count("--min-conf"))
            cfg.refine.tracker.min_conf = pl_filter.tracker.min_conf;
        if (pipeline->count("--sliding")) cfg.refine.window = rohan::WindowMode::sliding;
        if (pipeline->count("--drop-empty")) cfg.refine.drop_empty = pl_filter.drop_empty;
        const auto records = rohan::run_pipeline(cfg, pl_resume, std::cout);
        std::cout << "run complete: " << records.size() << " cycles, report at "
                  << (cfg.run_dir / "report.jsonl").string() << "\n";
    });

    // --- report ------------------------------------------------------------
    auto* report = app.add_subcommand("report", "per-cycle metrics of a pipeline run");
    std::string rp_run, rp_csv, rp_json;
    report->add_option("run_dir", rp_run, "pipeline run directory")->required();
    add_sink_option(report, "--csv", rp_csv, "emit CSV ('-' = stdout)");
    add_sink_option(report, "--json", rp_json, "emit JSON records ('-' = stdout)");
    report->callback([&] {
        const auto records = rohan::load_cycle_records(require_dir(rp_run, "run"));
        if (report->count("--csv")) {
            const std::string dest = sink_target(report, "--csv", rp_csv);
            if (dest == "-") {
                rohan::write_report_csv(records, std::cout);
            } else {
                std::ofstream out(dest, std::ios::binary | std::ios::trunc);
                if (!out) throw rohan::io_error("cannot write " + dest);
                rohan::write_report_csv(records, out);
            }
        } else if (report->count("--json")) {
            ordered_json j = ordered_json::array();
            for (const rohan::CycleRecord& rec : records)
                j.push_back(rohan::cycle_record_json(rec, true));
            emit_json(j, sink_target(report, "--json", rp_json));
        } else {
            rohan::write_report_csv(records, std::cout);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const rohan::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 10;
    }
}
