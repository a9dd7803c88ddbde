#include "rohan/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "rohan/errors.hpp"
#include "rohan/yolo.hpp"

namespace rohan {

std::vector<bool> match_detections(const std::vector<BBox>& preds,
                                   const std::vector<BBox>& gts, double iou_thr) {
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].conf.value_or(1.0) > preds[b].conf.value_or(1.0);
    });

    std::vector<bool> tp(preds.size(), false);
    std::vector<char> gt_used(gts.size(), 0);
    for (std::size_t pi : order) {
        double best = 0;
        std::ptrdiff_t best_gt = -1;
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (gt_used[gi] || gts[gi].class_id != preds[pi].class_id) continue;
            const double v = iou(preds[pi], gts[gi]);
            if (v >= iou_thr && v > best) {
                best = v;
                best_gt = std::ptrdiff_t(gi);
            }
        }
        if (best_gt >= 0) {
            gt_used[best_gt] = 1;
            tp[pi] = true;
        }
    }
    return tp;
}

double average_precision(const std::vector<bool>& flags, long n_gt) {
    if (n_gt <= 0) return 0.0;
    std::vector<double> rec, prec;
    long tp = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        tp += flags[i] ? 1 : 0;
        rec.push_back(double(tp) / double(n_gt));
        prec.push_back(double(tp) / double(i + 1));
    }
    // Monotone envelope, then the exact area under the stepwise curve.
    for (std::size_t i = prec.size(); i-- > 1;) prec[i - 1] = std::max(prec[i - 1], prec[i]);
    double ap = 0, prev_r = 0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        ap += (rec[i] - prev_r) * prec[i];
        prev_r = rec[i];
    }
    return ap;
}

namespace {

struct Ranked {
    double conf = 0;
    bool tp = false;
};

double safe_div(long num, long den) { return den == 0 ? 0.0 : double(num) / double(den); }

}  // namespace

EvalReport evaluate_samples(const std::vector<ImageSample>& samples, double iou_thr,
                            std::optional<double> conf_override) {
    if (!(iou_thr > 0 && iou_thr <= 1)) throw usage_error("eval: iou threshold must be in (0,1]");

    EvalReport r;
    std::vector<Ranked> ranked;
    for (const ImageSample& s : samples) {
        r.n_gt += long(s.gts.size());
        r.n_pred += long(s.preds.size());
        const std::vector<bool> tp = match_detections(s.preds, s.gts, iou_thr);
        for (std::size_t i = 0; i < s.preds.size(); ++i)
            ranked.push_back({s.preds[i].conf.value_or(1.0), tp[i]});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.conf > b.conf; });

    std::vector<bool> flags(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) flags[i] = ranked[i].tp;
    r.map50 = average_precision(flags, r.n_gt);

    std::vector<long> cum_tp(ranked.size() + 1, 0);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        cum_tp[i + 1] = cum_tp[i] + (ranked[i].tp ? 1 : 0);
        r.pr_curve.push_back({safe_div(cum_tp[i + 1], r.n_gt),
                              safe_div(cum_tp[i + 1], long(i + 1)), ranked[i].conf});
    }

    // Operating point: either the caller's cutoff or the max-F1 prefix.
    // Prefixes can only end where the confidence strictly drops, so equal
    // confidences are never split.
    std::size_t op_end = 0;
    if (conf_override) {
        r.op_conf = *conf_override;
        while (op_end < ranked.size() && ranked[op_end].conf >= r.op_conf) ++op_end;
    } else if (!ranked.empty()) {
        double best_f1 = -1;
        std::size_t best_end = 0;
        for (std::size_t end = 1; end <= ranked.size(); ++end) {
            if (end < ranked.size() && ranked[end].conf == ranked[end - 1].conf) continue;
            const long tp = cum_tp[end];
            const long denom = long(end) + r.n_gt;  // 2tp + fp + fn
            const double f1 = denom == 0 ? 0.0 : 2.0 * double(tp) / double(denom);
            if (f1 > best_f1) {
                best_f1 = f1;
                best_end = end;
            }
        }
        op_end = best_end;
        r.op_conf = ranked[op_end - 1].conf;
    } else {
        r.op_conf = 0;
    }

    r.tp = cum_tp[op_end];
    r.fp = long(op_end) - r.tp;
    r.fn = r.n_gt - r.tp;
    r.precision = safe_div(r.tp, r.tp + r.fp);
    r.recall = safe_div(r.tp, r.n_gt);
    return r;
}

EvalReport evaluate(const std::filesystem::path& pred_root,
                    const std::filesystem::path& gt_root, double iou_thr,
                    std::optional<double> conf_override) {
    const auto preds = list_label_files(pred_root);
    const auto gts = list_label_files(gt_root);
    std::set<std::string> keys;
    for (const auto& [k, p] : preds) keys.insert(k);
    for (const auto& [k, p] : gts) keys.insert(k);

    std::vector<ImageSample> samples;
    samples.reserve(keys.size());
    for (const std::string& k : keys) {
        ImageSample s;
        if (auto it = preds.find(k); it != preds.end())
            s.preds = load_yolo_file(it->second, YoloKind::predictions);
        if (auto it = gts.find(k); it != gts.end())
            s.gts = load_yolo_file(it->second, YoloKind::labels);
        samples.push_back(std::move(s));
    }
    return evaluate_samples(samples, iou_thr, conf_override);
}

}  // namespace rohan
