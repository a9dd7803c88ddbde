#pragma once

// Shared helpers for the test suites: scratch directories and the
// independent oracles the numeric code is checked against.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rohan/core.hpp"
#include "rohan/eval.hpp"

namespace testsupport {

class TempDir {
public:
    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "rohan-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// IoU by counting unit cells on an integer grid; exact for integer-corner
// boxes. Boxes are half-open [x0,x1) x [y0,y1).
inline double rasterized_iou(int ax0, int ay0, int ax1, int ay1, int bx0, int by0, int bx1,
                             int by1) {
    long inter = 0, uni = 0;
    const int x0 = std::min(ax0, bx0), x1 = std::max(ax1, bx1);
    const int y0 = std::min(ay0, by0), y1 = std::max(ay1, by1);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = x >= ax0 && x < ax1 && y >= ay0 && y < ay1;
            const bool in_b = x >= bx0 && x < bx1 && y >= by0 && y < by1;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni == 0 ? 0.0 : double(inter) / double(uni);
}

// Minimum assignment cost by enumerating every injection of the smaller
// side into the larger.
inline double brute_force_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t rows = cost.size();
    if (rows == 0) return 0.0;
    const std::size_t cols = cost[0].size();
    if (cols == 0) return 0.0;
    const bool transpose = rows > cols;
    const std::size_t small = std::min(rows, cols), big = std::max(rows, cols);
    std::vector<int> perm(big);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0;
        for (std::size_t i = 0; i < small; ++i)
            total += transpose ? cost[std::size_t(perm[i])][i] : cost[i][std::size_t(perm[i])];
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// --- detection-metrics oracle -------------------------------------------
// Independent of the eval module: per-image greedy matching is re-derived
// from the written rule, the PR curve is built per confidence cutoff by
// re-matching from scratch, AP uses an O(n^2) max-scan envelope.

inline std::vector<bool> oracle_match(const std::vector<rohan::BBox>& preds,
                                      const std::vector<rohan::BBox>& gts, double thr) {
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].conf.value_or(1.0) > preds[b].conf.value_or(1.0);
    });
    std::vector<bool> tp(preds.size(), false);
    std::vector<bool> taken(gts.size(), false);
    for (std::size_t pi : order) {
        double best = -1;
        std::size_t best_gi = gts.size();
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (taken[gi] || gts[gi].class_id != preds[pi].class_id) continue;
            const double v = rohan::iou(preds[pi], gts[gi]);
            if (v >= thr && v > best) {
                best = v;
                best_gi = gi;
            }
        }
        if (best_gi < gts.size()) {
            taken[best_gi] = true;
            tp[pi] = true;
        }
    }
    return tp;
}

struct OracleReport {
    double precision = 0;
    double recall = 0;
    double map50 = 0;
    double op_conf = 0;
    long tp = 0, fp = 0, fn = 0;
};

inline OracleReport oracle_evaluate(const std::vector<rohan::ImageSample>& samples,
                                    double thr) {
    long n_gt = 0;
    std::vector<std::pair<double, bool>> ranked;  // (conf, tp) over all preds
    std::vector<double> cutoffs;
    for (const rohan::ImageSample& s : samples) {
        n_gt += long(s.gts.size());
        const auto tp = oracle_match(s.preds, s.gts, thr);
        for (std::size_t i = 0; i < s.preds.size(); ++i) {
            ranked.emplace_back(s.preds[i].conf.value_or(1.0), tp[i]);
            cutoffs.push_back(s.preds[i].conf.value_or(1.0));
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    OracleReport r;
    if (n_gt > 0 && !ranked.empty()) {
        std::vector<double> rec, prec;
        long tp_cum = 0;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            tp_cum += ranked[i].second ? 1 : 0;
            rec.push_back(double(tp_cum) / double(n_gt));
            prec.push_back(double(tp_cum) / double(i + 1));
        }
        double ap = 0, prev = 0;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            double env = 0;
            for (std::size_t k = i; k < prec.size(); ++k) env = std::max(env, prec[k]);
            ap += (rec[i] - prev) * env;
            prev = rec[i];
        }
        r.map50 = ap;
    }

    // Operating point: re-match from scratch at every distinct cutoff,
    // pick the highest cutoff with strictly maximal F1.
    std::sort(cutoffs.begin(), cutoffs.end(), std::greater<>());
    cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
    double best_f1 = -1;
    for (double c : cutoffs) {
        long tp = 0, np = 0;
        for (const rohan::ImageSample& s : samples) {
            std::vector<rohan::BBox> kept;
            for (const rohan::BBox& b : s.preds)
                if (b.conf.value_or(1.0) >= c) kept.push_back(b);
            np += long(kept.size());
            for (bool f : oracle_match(kept, s.gts, thr)) tp += f ? 1 : 0;
        }
        const long denom = np + n_gt;
        const double f1 = denom == 0 ? 0.0 : 2.0 * double(tp) / double(denom);
        if (f1 > best_f1) {
            best_f1 = f1;
            r.op_conf = c;
            r.tp = tp;
            r.fp = np - tp;
            r.fn = n_gt - tp;
        }
    }
    if (r.tp + r.fp > 0) r.precision = double(r.tp) / double(r.tp + r.fp);
    if (n_gt > 0) r.recall = double(r.tp) / double(n_gt);
    return r;
}

// Random boxes safe against validity limits.
inline rohan::BBox random_box(std::mt19937& rng, bool with_conf) {
    std::uniform_real_distribution<double> size(0.05, 0.4);
    const double w = size(rng), h = size(rng);
    std::uniform_real_distribution<double> px(w / 2, 1 - w / 2);
    std::uniform_real_distribution<double> py(h / 2, 1 - h / 2);
    rohan::BBox b;
    b.w = w;
    b.h = h;
    b.cx = px(rng);
    b.cy = py(rng);
    if (with_conf) b.conf = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return b;
}

}  // namespace testsupport
