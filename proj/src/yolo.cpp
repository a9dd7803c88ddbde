#include "rohan/yolo.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include "rohan/errors.hpp"
#include "rohan/image_io.hpp"

namespace fs = std::filesystem;

namespace rohan {

std::string format_yolo_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string format_yolo(const std::vector<BBox>& boxes, YoloKind kind) {
    std::string out;
    for (const BBox& b : boxes) {
        out += std::to_string(b.class_id);
        out += ' ';
        out += format_yolo_value(b.cx);
        out += ' ';
        out += format_yolo_value(b.cy);
        out += ' ';
        out += format_yolo_value(b.w);
        out += ' ';
        out += format_yolo_value(b.h);
        if (kind == YoloKind::predictions) {
            out += ' ';
            out += format_yolo_value(b.conf.value_or(1.0));
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

[[noreturn]] void parse_fail(const std::string& origin, int line_no, const std::string& what) {
    throw format_error(origin + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view field, const std::string& origin, int line_no,
                    const char* name) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(origin, line_no, std::string("invalid ") + name + " '" + std::string(field) + "'");
    return v;
}

int parse_class(std::string_view field, const std::string& origin, int line_no) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || v < 0)
        parse_fail(origin, line_no, "invalid class id '" + std::string(field) + "'");
    return v;
}

}  // namespace

std::vector<BBox> parse_yolo(const std::string& text_in, YoloKind kind,
                             const std::string& origin) {
    std::string_view text = text_in;
    std::vector<BBox> boxes;
    const size_t expected = kind == YoloKind::labels ? 5 : 6;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != expected)
            parse_fail(origin, line_no,
                       "expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()));
        BBox b;
        b.class_id = parse_class(fields[0], origin, line_no);
        b.cx = parse_double(fields[1], origin, line_no, "cx");
        b.cy = parse_double(fields[2], origin, line_no, "cy");
        b.w = parse_double(fields[3], origin, line_no, "w");
        b.h = parse_double(fields[4], origin, line_no, "h");
        if (kind == YoloKind::predictions)
            b.conf = parse_double(fields[5], origin, line_no, "conf");
        if (!(b.cx >= 0 && b.cx <= 1) || !(b.cy >= 0 && b.cy <= 1))
            parse_fail(origin, line_no, "center out of [0,1]");
        if (!(b.w > 0 && b.w <= 1) || !(b.h > 0 && b.h <= 1))
            parse_fail(origin, line_no, "size out of (0,1]");
        if (b.conf && !(*b.conf >= 0 && *b.conf <= 1))
            parse_fail(origin, line_no, "confidence out of [0,1]");
        boxes.push_back(b);
    }
    return boxes;
}

std::vector<BBox> load_yolo_file(const std::filesystem::path& path, YoloKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_yolo(ss.str(), kind, path.string());
}

void write_yolo_file(const std::filesystem::path& path, const std::vector<BBox>& boxes,
                     YoloKind kind) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    out << format_yolo(boxes, kind);
    if (!out) throw io_error("failed writing " + path.string());
}

std::map<std::string, std::filesystem::path> list_label_files(const std::filesystem::path& root) {
    fs::path dir = root;
    if (fs::is_directory(root / "labels")) dir = root / "labels";
    if (!fs::is_directory(dir)) throw io_error("no such directory: " + dir.string());
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        if (p.extension() != ".txt") continue;
        fs::path key = p.lexically_relative(dir);
        key.replace_extension();
        out[key.generic_string()] = p;
    }
    return out;
}

}  // namespace rohan
