#pragma once

#include <json.hpp>

#include "rohan/eval.hpp"
#include "rohan/pipeline.hpp"

namespace rohan {

inline constexpr int kSchemaVersion = 1;

// Machine-output serialization; key order is fixed so identical inputs
// produce identical bytes.
nlohmann::ordered_json eval_report_json(const EvalReport& r, bool with_curve = true);
nlohmann::ordered_json cycle_record_json(const CycleRecord& rec, bool with_wall_time);
CycleRecord cycle_record_from_json(const nlohmann::ordered_json& j);

}  // namespace rohan
