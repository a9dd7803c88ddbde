#include "rohan/pipeline.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rohan/errors.hpp"
#include "rohan/image_io.hpp"
#include "rohan/json_io.hpp"
#include "rohan/yolo.hpp"

namespace fs = std::filesystem;

namespace rohan {

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

std::string cycle_name(int idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "cycle_%03d", idx);
    return buf;
}

// Last portion of a log file, for error messages.
std::string tail_of(const fs::path& file, std::size_t max_bytes = 2000) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return "";
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    const std::streamoff start =
        size > std::streamoff(max_bytes) ? size - std::streamoff(max_bytes) : 0;
    in.seekg(start);
    std::string tail(std::size_t(size - start), '\0');
    in.read(tail.data(), std::streamsize(tail.size()));
    while (!tail.empty() && (tail.back() == '\n' || tail.back() == '\r')) tail.pop_back();
    return tail;
}

int run_command(const std::string& cmd, const fs::path& out_log, const fs::path& err_log) {
    const std::string full = cmd + " > " + shell_quote(out_log.string()) + " 2> " +
                             shell_quote(err_log.string());
    const int status = std::system(full.c_str());
    if (status < 0) throw external_error("failed to launch: " + cmd);
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return 128;
}

[[noreturn]] void command_failed(const std::string& what, const std::string& cmd, int exit_code,
                                 const fs::path& err_log) {
    std::string msg = what + " failed with exit code " + std::to_string(exit_code) + ": " + cmd;
    const std::string tail = tail_of(err_log);
    if (!tail.empty()) msg += "\n--- stderr tail (" + err_log.string() + ") ---\n" + tail;
    throw external_error(std::move(msg));
}

fs::path resolve_against(const fs::path& base, const fs::path& p) {
    return p.is_absolute() ? p : base / p;
}

// Paths inside the run directory are stored relative to it so a run can be
// moved and reports stay byte-stable across machines.
fs::path rel_to_run(const fs::path& run_dir, const fs::path& p) {
    const fs::path rel = p.lexically_relative(run_dir);
    if (rel.empty() || rel.begin()->string() == "..") return p;
    return rel;
}

void require_key(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw usage_error(where + ": missing key '" + key + "'");
}

void write_report(const fs::path& run_dir, const std::vector<CycleRecord>& records) {
    const fs::path path = run_dir / "report.jsonl";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    for (const CycleRecord& rec : records) out << cycle_record_json(rec, false).dump() << '\n';
}

void write_record(const fs::path& cycle_dir, const CycleRecord& rec) {
    fs::create_directories(cycle_dir);
    const fs::path path = cycle_dir / "record.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    out << cycle_record_json(rec, true).dump(2) << '\n';
}

std::vector<FrameDetections> load_video_predictions(const fs::path& frames_dir,
                                                    const fs::path& pred_dir) {
    std::vector<FrameDetections> video;
    const std::vector<fs::path> images = list_images(frames_dir);
    video.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        const fs::path pred = pred_dir / (images[i].stem().string() + ".txt");
        video.push_back({int(i), load_yolo_file(pred, YoloKind::predictions)});
    }
    return video;
}

}  // namespace

std::string substitute_placeholders(
    const std::string& tmpl,
    const std::vector<std::pair<std::string, std::string>>& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t open = tmpl.find('{', pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        const std::size_t close = tmpl.find('}', open);
        if (close == std::string::npos)
            throw usage_error("unclosed '{' in command template: " + tmpl);
        const std::string name = tmpl.substr(open + 1, close - open - 1);
        const auto it = std::find_if(values.begin(), values.end(),
                                     [&](const auto& kv) { return kv.first == name; });
        if (it == values.end())
            throw usage_error("unknown placeholder '{" + name + "}' in command template: " + tmpl);
        out += shell_quote(it->second);
        pos = close + 1;
    }
    return out;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& json_file) {
    std::ifstream in(json_file, std::ios::binary);
    if (!in) throw io_error("cannot open " + json_file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(json_file.string() + ": " + e.what());
    }
    const std::string where = json_file.string();
    const fs::path base = fs::absolute(json_file).parent_path();

    static const char* top_keys[] = {"run_dir",     "frames_source",    "detect_cmd",
                                     "train_cmd",   "epochs_per_cycle", "cycles",
                                     "initial_weights", "eval_gt",      "eval_iou",
                                     "sample_fps",  "filter"};
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(std::begin(top_keys), std::end(top_keys),
                         [&](const char* k) { return key == k; }) == std::end(top_keys))
            throw usage_error(where + ": unknown key '" + key + "'");
    }

    PipelineConfig cfg;
    auto get_path = [&](const char* key) {
        require_key(j, key, where);
        return resolve_against(base, fs::path(j.at(key).get<std::string>()));
    };
    cfg.run_dir = get_path("run_dir");
    cfg.frames_source = get_path("frames_source");
    cfg.initial_weights = get_path("initial_weights");
    require_key(j, "detect_cmd", where);
    require_key(j, "train_cmd", where);
    cfg.detect_cmd = j.at("detect_cmd").get<std::string>();
    cfg.train_cmd = j.at("train_cmd").get<std::string>();
    cfg.epochs_per_cycle = j.value("epochs_per_cycle", cfg.epochs_per_cycle);
    cfg.cycles = j.value("cycles", cfg.cycles);
    cfg.eval_iou = j.value("eval_iou", cfg.eval_iou);
    cfg.sample_fps = j.value("sample_fps", cfg.sample_fps);
    if (j.contains("eval_gt") && !j.at("eval_gt").is_null())
        cfg.eval_gt = resolve_against(base, fs::path(j.at("eval_gt").get<std::string>()));

    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        static const char* filter_keys[] = {"mode",       "sliding",       "window_len",
                                            "radius",     "min_track_len", "conf_floor",
                                            "drop_empty", "iou_gate",      "max_misses",
                                            "min_conf"};
        for (const auto& [key, value] : f.items()) {
            if (std::find_if(std::begin(filter_keys), std::end(filter_keys),
                             [&](const char* k) { return key == k; }) == std::end(filter_keys))
                throw usage_error(where + ": unknown filter key '" + key + "'");
        }
        RefineOptions& r = cfg.refine;
        if (f.contains("mode")) r.mode = parse_filter_mode(f.at("mode").get<std::string>());
        if (f.value("sliding", false)) r.window = WindowMode::sliding;
        r.params.window_len = f.value("window_len", r.params.window_len);
        r.params.radius = f.value("radius", r.params.radius);
        r.params.min_track_len = f.value("min_track_len", r.params.min_track_len);
        r.params.conf_floor = f.value("conf_floor", r.params.conf_floor);
        r.drop_empty = f.value("drop_empty", r.drop_empty);
        r.tracker.iou_gate = f.value("iou_gate", r.tracker.iou_gate);
        r.tracker.max_misses = f.value("max_misses", r.tracker.max_misses);
        r.tracker.min_conf = f.value("min_conf", r.tracker.min_conf);
    }
    return cfg;
}

void validate_config(const PipelineConfig& cfg) {
    if (cfg.run_dir.empty()) throw usage_error("pipeline: run_dir is required");
    if (cfg.cycles < 1) throw usage_error("pipeline: cycles must be >= 1");
    if (cfg.epochs_per_cycle < 1) throw usage_error("pipeline: epochs_per_cycle must be >= 1");
    if (!(cfg.eval_iou > 0 && cfg.eval_iou <= 1))
        throw usage_error("pipeline: eval_iou must be in (0,1]");
    if (!(cfg.sample_fps > 0)) throw usage_error("pipeline: sample_fps must be > 0");
    for (const char* ph : {"{weights}", "{frames}", "{out}"})
        if (cfg.detect_cmd.find(ph) == std::string::npos)
            throw usage_error(std::string("pipeline: detect_cmd must contain ") + ph);
    for (const char* ph : {"{weights}", "{dataset}", "{out_weights}", "{epochs}"})
        if (cfg.train_cmd.find(ph) == std::string::npos)
            throw usage_error(std::string("pipeline: train_cmd must contain ") + ph);
    if (!fs::is_regular_file(cfg.initial_weights))
        throw io_error("pipeline: initial weights not found: " + cfg.initial_weights.string());
    if (!fs::is_directory(cfg.frames_source))
        throw io_error("pipeline: frames_source not found: " + cfg.frames_source.string());
    if (cfg.eval_gt) {
        if (!fs::is_directory(*cfg.eval_gt / "images") ||
            !fs::is_directory(*cfg.eval_gt / "labels"))
            throw io_error("pipeline: eval_gt needs images/ and labels/ under " +
                           cfg.eval_gt->string());
    }
}

std::vector<std::pair<std::string, std::filesystem::path>> list_videos(
    const std::filesystem::path& frames_source) {
    if (!fs::is_directory(frames_source))
        throw io_error("no such directory: " + frames_source.string());
    std::vector<std::pair<std::string, fs::path>> videos;
    for (const auto& entry : fs::directory_iterator(frames_source)) {
        if (!entry.is_directory()) continue;
        if (list_images(entry.path()).empty()) continue;
        videos.emplace_back(entry.path().filename().string(), entry.path());
    }
    std::sort(videos.begin(), videos.end());
    if (videos.empty() && !list_images(frames_source).empty())
        videos.emplace_back(frames_source.filename().string(), frames_source);
    if (videos.empty())
        throw io_error("no video frames under " + frames_source.string());
    return videos;
}

std::filesystem::path run_detector(const PipelineConfig& cfg,
                                   const std::filesystem::path& weights,
                                   const std::filesystem::path& frames_dir,
                                   const std::filesystem::path& out_dir,
                                   const std::filesystem::path& log_dir) {
    fs::create_directories(out_dir);
    fs::create_directories(log_dir);
    const std::string cmd = substitute_placeholders(
        cfg.detect_cmd, {{"weights", weights.string()},
                         {"frames", frames_dir.string()},
                         {"out", out_dir.string()}});
    const std::string tag = "detect_" + frames_dir.filename().string();
    const fs::path out_log = log_dir / (tag + ".log");
    const fs::path err_log = log_dir / (tag + ".err.log");
    const int code = run_command(cmd, out_log, err_log);
    if (code != 0) command_failed("detector", cmd, code, err_log);
    std::string offenders;
    for (const fs::path& img : list_images(frames_dir)) {
        const fs::path pred = out_dir / (img.stem().string() + ".txt");
        std::string problem;
        if (!fs::is_regular_file(pred)) {
            problem = "no predictions for " + img.filename().string() + " (expected " +
                      pred.string() + ")";
        } else {
            try {
                load_yolo_file(pred, YoloKind::predictions);
            } catch (const Error& e) {
                problem = e.what();
            }
        }
        if (!problem.empty()) offenders += (offenders.empty() ? "" : "; ") + problem;
    }
    if (!offenders.empty()) throw external_error("detector output incomplete: " + offenders);
    return out_dir;
}

CycleRecord run_cycle(const PipelineConfig& cfg, const std::filesystem::path& weights_in,
                      int cycle_idx) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path cycle_dir = cfg.run_dir / "cycles" / cycle_name(cycle_idx);
    const fs::path log_dir = cycle_dir / "logs";
    const fs::path dataset_dir = cycle_dir / "dataset";
    fs::create_directories(log_dir);
    fs::create_directories(dataset_dir);

    CycleRecord rec;
    rec.cycle_idx = cycle_idx;
    rec.weights_in = rel_to_run(cfg.run_dir, weights_in);

    for (const auto& [name, frames_dir] : list_videos(cfg.frames_source)) {
        const fs::path pred_dir = run_detector(cfg, weights_in, frames_dir,
                                               cycle_dir / "predictions" / name, log_dir);
        RefineOptions opt = cfg.refine;
        opt.prefix = name + "_";
        opt.cycle_idx = cycle_idx;
        const PseudoDatasetInfo info =
            build_pseudo_dataset(frames_dir, load_video_predictions(frames_dir, pred_dir), opt,
                                 dataset_dir);
        rec.stats.frames += info.frames;
        rec.stats.boxes_kept += info.boxes_kept;
        rec.stats.boxes_dropped += info.boxes_dropped;
    }
    {
        RefineOptions merged = cfg.refine;
        merged.cycle_idx = cycle_idx;
        write_provenance(dataset_dir, merged, rec.stats.frames, rec.stats.boxes_kept,
                         rec.stats.boxes_dropped);
    }
    if (rec.stats.frames == 0)
        throw external_error("cycle " + std::to_string(cycle_idx) +
                             ": every frame was filtered out, nothing to train on");

    const fs::path weights_out = cycle_dir / ("weights" + cfg.initial_weights.extension().string());
    const std::string cmd = substitute_placeholders(
        cfg.train_cmd, {{"weights", weights_in.string()},
                        {"dataset", dataset_dir.string()},
                        {"out_weights", weights_out.string()},
                        {"epochs", std::to_string(cfg.epochs_per_cycle)}});
    const int code = run_command(cmd, log_dir / "train.log", log_dir / "train.err.log");
    if (code != 0) command_failed("trainer", cmd, code, log_dir / "train.err.log");
    if (!fs::is_regular_file(weights_out))
        throw external_error("trainer exited 0 but wrote no weights at " + weights_out.string());
    rec.weights_ref = rel_to_run(cfg.run_dir, weights_out);

    if (cfg.eval_gt) {
        const fs::path pred_dir = run_detector(cfg, weights_out, *cfg.eval_gt / "images",
                                               cycle_dir / "eval_predictions", log_dir);
        rec.eval = evaluate(pred_dir, *cfg.eval_gt / "labels", cfg.eval_iou);
    }

    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_record(cycle_dir, rec);
    return rec;
}

std::vector<CycleRecord> run_pipeline(const PipelineConfig& cfg, bool resume, std::ostream& log) {
    validate_config(cfg);
    fs::create_directories(cfg.run_dir);
    const fs::path cycles_dir = cfg.run_dir / "cycles";
    if (!resume && fs::exists(cycles_dir) && !fs::is_empty(cycles_dir))
        throw usage_error(cycles_dir.string() +
                          " already contains cycles; pass --resume to continue the run");

    {
        nlohmann::ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["frames_source"] = cfg.frames_source.generic_string();
        j["detect_cmd"] = cfg.detect_cmd;
        j["train_cmd"] = cfg.train_cmd;
        j["epochs_per_cycle"] = cfg.epochs_per_cycle;
        j["cycles"] = cfg.cycles;
        j["initial_weights"] = cfg.initial_weights.generic_string();
        j["eval_gt"] = cfg.eval_gt ? nlohmann::ordered_json(cfg.eval_gt->generic_string())
                                   : nlohmann::ordered_json(nullptr);
        j["eval_iou"] = cfg.eval_iou;
        j["sample_fps"] = cfg.sample_fps;
        std::ofstream out(cfg.run_dir / "run.json", std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + (cfg.run_dir / "run.json").string());
        out << j.dump(2) << '\n';
    }

    std::vector<CycleRecord> records;
    fs::path weights = cfg.initial_weights;
    for (int idx = 1; idx <= cfg.cycles; ++idx) {
        const fs::path cycle_dir = cycles_dir / cycle_name(idx);
        if (resume && fs::is_regular_file(cycle_dir / "record.json")) {
            std::ifstream in(cycle_dir / "record.json", std::ios::binary);
            nlohmann::ordered_json j;
            CycleRecord rec;
            bool usable = false;
            try {
                j = nlohmann::ordered_json::parse(in);
                rec = cycle_record_from_json(j);
                usable = rec.status == "ok" &&
                         fs::is_regular_file(resolve_against(cfg.run_dir, rec.weights_ref));
            } catch (const nlohmann::json::exception&) {
                usable = false;
            }
            if (usable) {
                log << cycle_name(idx) << ": complete, skipping\n";
                weights = resolve_against(cfg.run_dir, rec.weights_ref);
                records.push_back(std::move(rec));
                write_report(cfg.run_dir, records);
                continue;
            }
        }
        if (fs::exists(cycle_dir)) {
            log << cycle_name(idx) << ": incomplete, restarting\n";
            fs::remove_all(cycle_dir);
        }
        log << cycle_name(idx) << ": running\n";
        try {
            CycleRecord rec = run_cycle(cfg, weights, idx);
            weights = resolve_against(cfg.run_dir, rec.weights_ref);
            log << cycle_name(idx) << ": ok, " << rec.stats.frames << " frames, "
                << rec.stats.boxes_kept << " boxes kept, " << rec.stats.boxes_dropped
                << " dropped";
            if (rec.eval)
                log << ", precision " << rec.eval->precision << ", recall " << rec.eval->recall
                    << ", mAP50 " << rec.eval->map50;
            log << '\n';
            records.push_back(std::move(rec));
            write_report(cfg.run_dir, records);
        } catch (const std::exception& e) {
            CycleRecord failed;
            failed.cycle_idx = idx;
            failed.weights_in = rel_to_run(cfg.run_dir, weights);
            failed.status = "failed";
            failed.error = e.what();
            write_record(cycle_dir, failed);
            records.push_back(failed);
            write_report(cfg.run_dir, records);
            throw;
        }
    }
    return records;
}

std::vector<CycleRecord> load_cycle_records(const std::filesystem::path& run_dir) {
    const fs::path cycles_dir = run_dir / "cycles";
    std::vector<CycleRecord> records;
    if (!fs::is_directory(cycles_dir)) return records;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(cycles_dir))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& dir : dirs) {
        const fs::path file = dir / "record.json";
        if (!fs::is_regular_file(file)) continue;
        std::ifstream in(file, std::ios::binary);
        try {
            records.push_back(cycle_record_from_json(nlohmann::ordered_json::parse(in)));
        } catch (const nlohmann::json::exception& e) {
            throw format_error(file.string() + ": " + e.what());
        }
    }
    return records;
}

void write_report_csv(const std::vector<CycleRecord>& records, std::ostream& out) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    out << "cycle,status,frames,boxes_kept,boxes_dropped,precision,recall,map50,op_conf\n";
    for (const CycleRecord& rec : records) {
        out << rec.cycle_idx << ',' << rec.status << ',' << rec.stats.frames << ','
            << rec.stats.boxes_kept << ',' << rec.stats.boxes_dropped << ',';
        if (rec.eval)
            out << fmt(rec.eval->precision) << ',' << fmt(rec.eval->recall) << ','
                << fmt(rec.eval->map50) << ',' << fmt(rec.eval->op_conf);
        else
            out << ",,,";
        out << '\n';
    }
}

}  // namespace rohan
