#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>
#include <sstream>

#include "rohan/assignment.hpp"
#include "rohan/augment.hpp"
#include "rohan/core.hpp"
#include "rohan/errors.hpp"
#include "rohan/eval.hpp"
#include "rohan/mask.hpp"
#include "rohan/refine.hpp"
#include "rohan/track.hpp"
#include "rohan/yolo.hpp"

namespace py = pybind11;
using namespace rohan;

namespace {

BinaryMask mask_from_array(const py::array& arr) {
    auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 2) throw py::value_error("mask must be a 2d array");
    const int h = int(a.shape(0)), w = int(a.shape(1));
    BinaryMask m(w, h);
    const std::uint8_t* data = a.data();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y, data[std::size_t(y) * w + x] != 0);
    return m;
}

py::array_t<bool> mask_to_array(const BinaryMask& m) {
    py::array_t<bool> out({m.height(), m.width()});
    bool* data = out.mutable_data();
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) data[std::size_t(y) * m.width() + x] = m.at(x, y);
    return out;
}

RgbImage image_from_array(const py::array& arr) {
    auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 3 || a.shape(2) != 3)
        throw py::value_error("image must be an (h, w, 3) uint8 array");
    RgbImage img;
    img.height = int(a.shape(0));
    img.width = int(a.shape(1));
    img.pixels.assign(a.data(), a.data() + a.size());
    return img;
}

py::array_t<std::uint8_t> image_to_array(const RgbImage& img) {
    py::array_t<std::uint8_t> out({img.height, img.width, 3});
    std::memcpy(out.mutable_data(), img.pixels.data(), img.pixels.size());
    return out;
}

Rgb rgb_from_tuple(const std::array<int, 3>& t) {
    Rgb c;
    for (int i = 0; i < 3; ++i) {
        if (t[i] < 0 || t[i] > 255) throw py::value_error("color channels must be in 0..255");
        c[i] = std::uint8_t(t[i]);
    }
    return c;
}

std::string bbox_repr(const BBox& b) {
    std::ostringstream ss;
    ss << "BBox(cx=" << b.cx << ", cy=" << b.cy << ", w=" << b.w << ", h=" << b.h;
    if (b.conf) ss << ", conf=" << *b.conf;
    if (b.class_id) ss << ", class_id=" << b.class_id;
    ss << ")";
    return ss.str();
}

}  // namespace

PYBIND11_MODULE(_rohan, m) {
    m.doc() = "hand-detection dataset toolkit core";

    py::register_exception<Error>(m, "ToolkitError");

    py::class_<BBox>(m, "BBox")
        .def(py::init([](double cx, double cy, double w, double h, std::optional<double> conf,
                         int class_id) {
                 BBox b{cx, cy, w, h, conf, class_id};
                 return b;
             }),
             py::arg("cx"), py::arg("cy"), py::arg("w"), py::arg("h"),
             py::arg("conf") = py::none(), py::arg("class_id") = 0)
        .def_readwrite("cx", &BBox::cx)
        .def_readwrite("cy", &BBox::cy)
        .def_readwrite("w", &BBox::w)
        .def_readwrite("h", &BBox::h)
        .def_readwrite("conf", &BBox::conf)
        .def_readwrite("class_id", &BBox::class_id)
        .def("__repr__", &bbox_repr);

    py::class_<FrameDetections>(m, "FrameDetections")
        .def(py::init([](int frame_idx, std::vector<BBox> boxes) {
                 return FrameDetections{frame_idx, std::move(boxes)};
             }),
             py::arg("frame_idx"), py::arg("boxes") = std::vector<BBox>())
        .def_readwrite("frame_idx", &FrameDetections::frame_idx)
        .def_readwrite("boxes", &FrameDetections::boxes);

    py::class_<TrackObservation>(m, "TrackObservation")
        .def_readonly("frame_idx", &TrackObservation::frame_idx)
        .def_readonly("box", &TrackObservation::box);

    py::class_<Track>(m, "Track")
        .def_readonly("id", &Track::id)
        .def_readonly("observations", &Track::observations)
        .def_property_readonly("state", [](const Track& t) { return to_string(t.state); })
        .def("__len__", [](const Track& t) { return t.observations.size(); });

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("precision", &EvalReport::precision)
        .def_readonly("recall", &EvalReport::recall)
        .def_readonly("map50", &EvalReport::map50)
        .def_readonly("op_conf", &EvalReport::op_conf)
        .def_readonly("tp", &EvalReport::tp)
        .def_readonly("fp", &EvalReport::fp)
        .def_readonly("fn", &EvalReport::fn)
        .def_readonly("n_gt", &EvalReport::n_gt)
        .def_readonly("n_pred", &EvalReport::n_pred)
        .def_property_readonly("pr_curve", [](const EvalReport& r) {
            std::vector<std::tuple<double, double, double>> pts;
            for (const PrPoint& p : r.pr_curve) pts.emplace_back(p.recall, p.precision, p.conf);
            return pts;
        });

    m.def("iou", py::overload_cast<const BBox&, const BBox&>(&iou), py::arg("a"), py::arg("b"));

    m.def(
        "bbox_from_mask",
        [](const py::array& mask) { return bbox_from_mask(mask_from_array(mask)); },
        py::arg("mask"));

    m.def(
        "connected_component_boxes",
        [](const py::array& mask) {
            std::vector<std::tuple<int, int, int, int>> out;
            for (const PixelBox& b : connected_component_boxes(mask_from_array(mask)))
                out.emplace_back(b.x0, b.y0, b.x1, b.y1);
            return out;
        },
        py::arg("mask"));

    m.def(
        "to_pixel",
        [](const BBox& b, int width, int height) {
            const PixelBox p = to_pixel(b, width, height);
            return std::make_tuple(p.x0, p.y0, p.x1, p.y1);
        },
        py::arg("box"), py::arg("width"), py::arg("height"));

    m.def(
        "to_normalized",
        [](int x0, int y0, int x1, int y1, int width, int height, std::optional<double> conf,
           int class_id) {
            return to_normalized(PixelBox{x0, y0, x1, y1}, width, height, conf, class_id);
        },
        py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"), py::arg("width"),
        py::arg("height"), py::arg("conf") = py::none(), py::arg("class_id") = 0);

    m.def(
        "overlay_glove",
        [](const py::array& img, const py::array& mask, const std::array<int, 3>& color,
           double opacity) {
            GloveSpec spec;
            spec.color = rgb_from_tuple(color);
            spec.opacity = opacity;
            return image_to_array(overlay_glove(image_from_array(img), mask_from_array(mask),
                                                spec));
        },
        py::arg("image"), py::arg("mask"), py::arg("color"), py::arg("opacity"));

    m.def(
        "synth_blood_mask",
        [](const py::array& mask, std::uint64_t seed, double density, double blur_sigma,
           double blob_threshold, int close_radius, int open_radius) {
            BloodParams p;
            p.seed = seed;
            p.density = density;
            p.blur_sigma = blur_sigma;
            p.blob_threshold = blob_threshold;
            p.close_radius = close_radius;
            p.open_radius = open_radius;
            return mask_to_array(synth_blood_mask(mask_from_array(mask), p));
        },
        py::arg("mask"), py::arg("seed"), py::arg("density") = 0.005,
        py::arg("blur_sigma") = 4.0, py::arg("blob_threshold") = 0.02,
        py::arg("close_radius") = 3, py::arg("open_radius") = 2);

    m.def(
        "apply_blood",
        [](const py::array& img, const py::array& blood, const std::array<int, 3>& color,
           double opacity) {
            return image_to_array(apply_blood(image_from_array(img), mask_from_array(blood),
                                              rgb_from_tuple(color), opacity));
        },
        py::arg("image"), py::arg("blood"), py::arg("color") = std::array<int, 3>{120, 10, 15},
        py::arg("opacity") = 0.8);

    m.def(
        "assign",
        [](const std::vector<std::vector<double>>& cost, double gate) {
            const Matching mt = assign(cost, gate);
            return std::make_tuple(mt.pairs, mt.total_cost);
        },
        py::arg("cost"), py::arg("gate") = std::numeric_limits<double>::infinity());

    m.def(
        "run_tracker",
        [](const std::vector<FrameDetections>& video, double iou_gate, int max_misses,
           double min_conf) {
            return run_tracker(video, TrackerConfig{iou_gate, max_misses, min_conf});
        },
        py::arg("video"), py::arg("iou_gate") = 0.3, py::arg("max_misses") = 5,
        py::arg("min_conf") = 0.25);

    m.def(
        "spatial_filter",
        [](const std::vector<FrameDetections>& video, int window_len, double radius,
           bool sliding) {
            FilterParams p;
            p.window_len = window_len;
            p.radius = radius;
            return spatial_filter(video, p,
                                  sliding ? WindowMode::sliding : WindowMode::tumbling);
        },
        py::arg("video"), py::arg("window_len") = 10, py::arg("radius") = 0.35,
        py::arg("sliding") = false);

    m.def(
        "track_length_filter",
        [](const std::vector<Track>& tracks, int min_track_len) {
            FilterParams p;
            p.min_track_len = min_track_len;
            return track_length_filter(tracks, p);
        },
        py::arg("tracks"), py::arg("min_track_len") = 5);

    m.def("match_detections", &match_detections, py::arg("preds"), py::arg("gts"),
          py::arg("iou_thr") = 0.5);

    m.def(
        "average_precision",
        [](const std::vector<bool>& flags, long n_gt) { return average_precision(flags, n_gt); },
        py::arg("flags"), py::arg("n_gt"));

    m.def(
        "evaluate",
        [](const std::filesystem::path& pred_root, const std::filesystem::path& gt_root,
           double iou_thr, std::optional<double> conf) {
            return evaluate(pred_root, gt_root, iou_thr, conf);
        },
        py::arg("pred_root"), py::arg("gt_root"), py::arg("iou_thr") = 0.5,
        py::arg("conf") = py::none());

    m.def(
        "load_yolo",
        [](const std::filesystem::path& path, bool predictions) {
            return load_yolo_file(path, predictions ? YoloKind::predictions : YoloKind::labels);
        },
        py::arg("path"), py::arg("predictions") = false);

    m.def(
        "save_yolo",
        [](const std::filesystem::path& path, const std::vector<BBox>& boxes, bool predictions) {
            write_yolo_file(path, boxes, predictions ? YoloKind::predictions : YoloKind::labels);
        },
        py::arg("path"), py::arg("boxes"), py::arg("predictions") = false);

    m.def(
        "augment_dataset",
        [](const std::filesystem::path& in_root, const std::filesystem::path& out_root,
           std::uint64_t seed, int threads, std::optional<std::filesystem::path> palette) {
            const Palette pal = palette ? load_palette(*palette) : default_palette();
            const AugmentSummary s = augment_dataset(in_root, out_root, pal, seed, threads);
            py::dict d;
            d["images"] = s.images;
            d["boxes"] = s.boxes;
            py::list skipped;
            for (const SkippedItem& item : s.skipped) {
                py::dict e;
                e["name"] = item.name;
                e["reason"] = item.reason;
                skipped.append(e);
            }
            d["skipped"] = skipped;
            return d;
        },
        py::arg("in_root"), py::arg("out_root"), py::arg("seed") = 0, py::arg("threads") = 1,
        py::arg("palette") = py::none());
}
