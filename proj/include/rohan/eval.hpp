#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rohan/core.hpp"

namespace rohan {

struct PrPoint {
    double recall = 0;
    double precision = 0;
    double conf = 0;
};

struct EvalReport {
    double precision = 0;  // at op_conf
    double recall = 0;     // at op_conf
    double map50 = 0;      // AP of the single class at the configured IoU
    std::vector<PrPoint> pr_curve;  // cumulative curve, recalls non-decreasing
    double op_conf = 0;    // confidence threshold the P/R row is reported at
    long tp = 0, fp = 0, fn = 0;  // counts at op_conf
    long n_gt = 0, n_pred = 0;
};

// TP/FP flag per prediction, aligned with the input order. Predictions are
// processed in descending confidence (ties by input order); each claims
// the unmatched ground truth of highest IoU >= iou_thr, IoU ties going to
// the lowest ground-truth index. Predictions without confidence rank as 1.
std::vector<bool> match_detections(const std::vector<BBox>& preds,
                                   const std::vector<BBox>& gts, double iou_thr);

// All-point interpolated AP (monotone precision envelope, exact integral
// over recall) for flags ordered by descending confidence. n_gt == 0
// yields 0.
double average_precision(const std::vector<bool>& flags, long n_gt);

struct ImageSample {
    std::vector<BBox> preds;
    std::vector<BBox> gts;
};

// Pools matches over all images (single class). P/R are reported at the
// max-F1 confidence cutoff unless conf_override fixes the operating point.
EvalReport evaluate_samples(const std::vector<ImageSample>& samples, double iou_thr = 0.5,
                            std::optional<double> conf_override = std::nullopt);

// Directory form: label files paired by basename; a file missing on either
// side counts as empty (ground truth without predictions becomes all FN).
EvalReport evaluate(const std::filesystem::path& pred_root,
                    const std::filesystem::path& gt_root, double iou_thr = 0.5,
                    std::optional<double> conf_override = std::nullopt);

}  // namespace rohan
