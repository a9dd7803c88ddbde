#include "rohan/json_io.hpp"

namespace rohan {

nlohmann::ordered_json eval_report_json(const EvalReport& r, bool with_curve) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["map50"] = r.map50;
    j["op_conf"] = r.op_conf;
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    j["n_gt"] = r.n_gt;
    j["n_pred"] = r.n_pred;
    if (with_curve) {
        nlohmann::ordered_json curve = nlohmann::ordered_json::array();
        for (const PrPoint& p : r.pr_curve)
            curve.push_back({{"recall", p.recall}, {"precision", p.precision}, {"conf", p.conf}});
        j["pr_curve"] = std::move(curve);
    }
    return j;
}

nlohmann::ordered_json cycle_record_json(const CycleRecord& rec, bool with_wall_time) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["cycle"] = rec.cycle_idx;
    j["status"] = rec.status;
    j["error"] = rec.error;
    j["weights_in"] = rec.weights_in.generic_string();
    j["weights_ref"] = rec.weights_ref.generic_string();
    j["dataset"] = {{"frames", rec.stats.frames},
                    {"boxes_kept", rec.stats.boxes_kept},
                    {"boxes_dropped", rec.stats.boxes_dropped}};
    j["eval"] = rec.eval ? eval_report_json(*rec.eval, false) : nlohmann::ordered_json(nullptr);
    if (with_wall_time) j["wall_time_s"] = rec.wall_time_s;
    return j;
}

CycleRecord cycle_record_from_json(const nlohmann::ordered_json& j) {
    CycleRecord rec;
    rec.cycle_idx = j.at("cycle").get<int>();
    rec.status = j.at("status").get<std::string>();
    rec.error = j.value("error", std::string());
    rec.weights_in = std::filesystem::path(j.at("weights_in").get<std::string>());
    rec.weights_ref = std::filesystem::path(j.at("weights_ref").get<std::string>());
    const auto& d = j.at("dataset");
    rec.stats.frames = d.at("frames").get<long>();
    rec.stats.boxes_kept = d.at("boxes_kept").get<long>();
    rec.stats.boxes_dropped = d.at("boxes_dropped").get<long>();
    if (j.contains("eval") && !j.at("eval").is_null()) {
        const auto& e = j.at("eval");
        EvalReport r;
        r.precision = e.at("precision").get<double>();
        r.recall = e.at("recall").get<double>();
        r.map50 = e.at("map50").get<double>();
        r.op_conf = e.at("op_conf").get<double>();
        r.tp = e.at("tp").get<long>();
        r.fp = e.at("fp").get<long>();
        r.fn = e.at("fn").get<long>();
        r.n_gt = e.at("n_gt").get<long>();
        r.n_pred = e.at("n_pred").get<long>();
        rec.eval = std::move(r);
    }
    if (j.contains("wall_time_s")) rec.wall_time_s = j.at("wall_time_s").get<double>();
    return rec;
}

}  // namespace rohan
