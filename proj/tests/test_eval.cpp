#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rohan/errors.hpp"
#include "rohan/eval.hpp"
#include "rohan/yolo.hpp"
#include "support.hpp"

using rohan::BBox;
using rohan::EvalReport;
using rohan::ImageSample;

static BBox at(double cx, double cy, double size, std::optional<double> conf = std::nullopt) {
    BBox b{cx, cy, size, size};
    b.conf = conf;
    return b;
}

TEST_CASE("a perfect prediction is a true positive") {
    const auto flags = rohan::match_detections({at(0.5, 0.5, 0.2, 0.9)},
                                               {at(0.5, 0.5, 0.2)}, 0.5);
    REQUIRE(flags.size() == 1);
    CHECK(flags[0]);
}

TEST_CASE("predictions without ground truth are false positives") {
    const auto flags = rohan::match_detections({at(0.5, 0.5, 0.2, 0.9)}, {}, 0.5);
    REQUIRE(flags.size() == 1);
    CHECK_FALSE(flags[0]);
}

TEST_CASE("each ground truth is claimed once, best confidence first") {
    const std::vector<BBox> preds = {at(0.5, 0.5, 0.2, 0.8), at(0.5, 0.5, 0.2, 0.9)};
    const auto flags = rohan::match_detections(preds, {at(0.5, 0.5, 0.2)}, 0.5);
    REQUIRE(flags.size() == 2);
    CHECK_FALSE(flags[0]);  // conf 0.8 loses the ground truth to conf 0.9
    CHECK(flags[1]);
}

TEST_CASE("class ids must agree for a match") {
    std::vector<BBox> gt = {at(0.5, 0.5, 0.2)};
    gt[0].class_id = 1;
    const auto flags = rohan::match_detections({at(0.5, 0.5, 0.2, 0.9)}, gt, 0.5);
    CHECK_FALSE(flags[0]);
}

TEST_CASE("average precision hand values") {
    CHECK(rohan::average_precision({true}, 1) == 1.0);
    CHECK(rohan::average_precision({true, false}, 1) == 1.0);
    CHECK(rohan::average_precision({false, true}, 1) == 0.5);
    CHECK(rohan::average_precision({}, 3) == 0.0);
    CHECK(rohan::average_precision({true, true}, 0) == 0.0);
}

TEST_CASE("average precision never drops when a trailing miss is removed") {
    std::mt19937 rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<bool> flags;
        for (int i = int(2 + rng() % 10); i > 0; --i) flags.push_back(rng() % 2 == 0);
        const long n_gt = 1 + long(rng() % 8);
        std::vector<bool> with_fp = flags;
        with_fp.push_back(false);
        CHECK(rohan::average_precision(flags, n_gt) >=
              rohan::average_precision(with_fp, n_gt));
    }
}

TEST_CASE("perfect detections give perfect scores") {
    std::vector<ImageSample> samples(3);
    for (int i = 0; i < 3; ++i) {
        const BBox gt = at(0.2 + 0.2 * i, 0.5, 0.15);
        samples[std::size_t(i)].gts = {gt};
        BBox pred = gt;
        pred.conf = 1.0;
        samples[std::size_t(i)].preds = {pred};
    }
    const EvalReport r = rohan::evaluate_samples(samples);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.map50 == 1.0);
    CHECK(r.tp == 3);
    CHECK(r.fp == 0);
    CHECK(r.fn == 0);
}

TEST_CASE("no predictions at all still evaluates") {
    std::vector<ImageSample> samples(1);
    samples[0].gts = {at(0.5, 0.5, 0.2)};
    const EvalReport r = rohan::evaluate_samples(samples);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.map50 == 0.0);
    CHECK(r.op_conf == 0.0);
    CHECK(r.fn == 1);
    CHECK(r.n_pred == 0);
}

TEST_CASE("the operating point maximizes F1") {
    // Ranked flags: TP@0.9, FP@0.8, TP@0.7 over two ground truths. The
    // full prefix wins (F1 0.8 against 0.667 and 0.5).
    std::vector<ImageSample> samples(2);
    samples[0].gts = {at(0.3, 0.3, 0.2)};
    samples[0].preds = {at(0.3, 0.3, 0.2, 0.9), at(0.7, 0.7, 0.2, 0.8)};
    samples[1].gts = {at(0.5, 0.5, 0.2)};
    samples[1].preds = {at(0.5, 0.5, 0.2, 0.7)};
    const EvalReport r = rohan::evaluate_samples(samples);
    CHECK(r.op_conf == 0.7);
    CHECK(r.tp == 2);
    CHECK(r.fp == 1);
    CHECK(r.fn == 0);
    CHECK(r.precision == doctest::Approx(2.0 / 3.0));
    CHECK(r.recall == 1.0);

    const EvalReport fixed = rohan::evaluate_samples(samples, 0.5, 0.75);
    CHECK(fixed.op_conf == 0.75);
    CHECK(fixed.tp == 1);
    CHECK(fixed.fp == 1);
    CHECK(fixed.precision == 0.5);
    CHECK(fixed.recall == 0.5);
}

TEST_CASE("equal confidences stay in one operating bucket") {
    std::vector<ImageSample> samples(1);
    samples[0].gts = {at(0.3, 0.3, 0.2)};
    samples[0].preds = {at(0.3, 0.3, 0.2, 0.8), at(0.7, 0.7, 0.2, 0.8)};
    const EvalReport r = rohan::evaluate_samples(samples);
    CHECK(r.op_conf == 0.8);
    CHECK(r.tp == 1);
    CHECK(r.fp == 1);
    CHECK(r.recall == 1.0);
}

TEST_CASE("pr curve recall never decreases") {
    std::mt19937 rng(71);
    std::vector<ImageSample> samples(4);
    for (ImageSample& s : samples) {
        for (int i = int(rng() % 4); i > 0; --i) s.gts.push_back(testsupport::random_box(rng, false));
        for (int i = int(rng() % 5); i > 0; --i) s.preds.push_back(testsupport::random_box(rng, true));
    }
    const EvalReport r = rohan::evaluate_samples(samples);
    CHECK(r.pr_curve.size() == std::size_t(r.n_pred));
    double prev_recall = 0, prev_conf = 2;
    for (const rohan::PrPoint& pt : r.pr_curve) {
        CHECK(pt.recall >= prev_recall);
        CHECK(pt.conf <= prev_conf);
        prev_recall = pt.recall;
        prev_conf = pt.conf;
    }
}

TEST_CASE("counts always satisfy tp + fn = n_gt") {
    std::mt19937 rng(73);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<ImageSample> samples(1 + rng() % 5);
        for (ImageSample& s : samples) {
            for (int i = int(rng() % 4); i > 0; --i)
                s.gts.push_back(testsupport::random_box(rng, false));
            for (int i = int(rng() % 4); i > 0; --i)
                s.preds.push_back(testsupport::random_box(rng, true));
        }
        const EvalReport r = rohan::evaluate_samples(samples);
        CHECK(r.tp + r.fn == r.n_gt);
        CHECK(r.tp >= 0);
        CHECK(r.fp >= 0);
        CHECK(r.map50 >= 0.0);
        CHECK(r.map50 <= 1.0);
    }
}

TEST_CASE("random corpora agree with the exhaustive oracle") {
    std::mt19937 rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ImageSample> samples(1 + rng() % 5);
        for (ImageSample& s : samples) {
            for (int i = int(rng() % 5); i > 0; --i)
                s.gts.push_back(testsupport::random_box(rng, false));
            for (int i = int(rng() % 5); i > 0; --i)
                s.preds.push_back(testsupport::random_box(rng, true));
        }
        const EvalReport got = rohan::evaluate_samples(samples);
        const testsupport::OracleReport want = testsupport::oracle_evaluate(samples, 0.5);
        CHECK(got.map50 == doctest::Approx(want.map50).epsilon(1e-12));
        CHECK(got.precision == doctest::Approx(want.precision).epsilon(1e-12));
        CHECK(got.recall == doctest::Approx(want.recall).epsilon(1e-12));
        if (got.n_pred > 0 && got.n_gt > 0) {
            CHECK(got.op_conf == want.op_conf);
            CHECK(got.tp == want.tp);
            CHECK(got.fp == want.fp);
        }
    }
}

TEST_CASE("directory evaluation pairs files by stem") {
    testsupport::TempDir tmp;
    const auto pred = tmp.path() / "pred";
    const auto gt = tmp.path() / "gt";
    testsupport::write_file(pred / "a.txt", "0 0.5 0.5 0.2 0.2 0.9\n");
    testsupport::write_file(gt / "a.txt", "0 0.5 0.5 0.2 0.2\n");
    testsupport::write_file(gt / "b.txt", "0 0.3 0.3 0.2 0.2\n");   // no predictions
    testsupport::write_file(pred / "c.txt", "0 0.7 0.7 0.2 0.2 0.8\n");  // no ground truth
    const EvalReport r = rohan::evaluate(pred, gt, 0.5, 0.0);
    CHECK(r.n_gt == 2);
    CHECK(r.n_pred == 2);
    CHECK(r.tp == 1);
    CHECK(r.fp == 1);
    CHECK(r.fn == 1);
}

TEST_CASE("a bad iou threshold is rejected") {
    CHECK_THROWS_AS(rohan::evaluate_samples({}, 0.0), rohan::Error);
    CHECK_THROWS_AS(rohan::evaluate_samples({}, 1.5), rohan::Error);
}
