#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rohan/core.hpp"

namespace rohan {

// Field layout of a YOLO label line: training labels carry 5 fields
// (class cx cy w h), detector predictions append a confidence.
enum class YoloKind { labels, predictions };

// Canonical coordinate formatting; parse/format round trips are
// bit-identical.
std::string format_yolo_value(double v);

std::string format_yolo(const std::vector<BBox>& boxes, YoloKind kind);
std::vector<BBox> parse_yolo(const std::string& text, YoloKind kind,
                             const std::string& origin = "<memory>");

std::vector<BBox> load_yolo_file(const std::filesystem::path& p, YoloKind kind);
void write_yolo_file(const std::filesystem::path& p, const std::vector<BBox>& boxes, YoloKind kind);

// All *.txt files under `root` (or `root`/labels when that exists), keyed
// by path relative to that directory with the extension dropped.
std::map<std::string, std::filesystem::path> list_label_files(const std::filesystem::path& root);

}  // namespace rohan
