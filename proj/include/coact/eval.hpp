#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "coact/linalg.hpp"
#include "coact/types.hpp"

namespace coact::eval {

struct MatchedPair {
    std::size_t index_a = 0;
    std::size_t index_b = 0;
    double iou = 0.0;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    std::vector<std::size_t> unmatched_a;
    std::vector<std::size_t> unmatched_b;
};

// Greedy one-to-one matching in descending IoU order among candidate pairs
// with IoU >= threshold; ties broken by (lower index_a, lower index_b).
// When class_agnostic is false only same-label pairs are candidates.
MatchResult match_instances(const std::vector<Detection>& a, const std::vector<Detection>& b,
                            double iou_threshold = 0.5, bool class_agnostic = false);

struct KappaResult {
    double kappa = 0.0;
    // both raters constant on the same label: p_e = 1, kappa = 1 by convention
    bool degenerate_marginals = false;
};

KappaResult cohen_kappa(const std::vector<std::pair<std::string, std::string>>& label_pairs);

struct PrfCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    void finalize();
};

struct IrrReport {
    std::vector<std::string> classes;  // taxonomy order
    std::vector<PrfCounts> per_class;
    PrfCounts overall;
    double kappa = 0.0;
    bool kappa_degenerate = false;
    double mean_iou = 0.0;
    bool kappa_gate = false;  // kappa >= 0.80
    bool miou_gate = false;   // mean IoU >= 0.70
    std::size_t frames_compared = 0;
    std::vector<std::string> warnings;
};

// Frame-by-frame class-agnostic matching over the frame keys (session_id, t)
// both logs share. Rater A is the reference: matched pairs with equal labels
// count TP; mismatched labels count one FP (B's label) and one FN (A's);
// unmatched B instances are FP, unmatched A instances FN.
IrrReport irr_report(const std::vector<FrameRecord>& frames_a,
                     const std::vector<FrameRecord>& frames_b,
                     const ActionTaxonomy& taxonomy, double iou_threshold = 0.5);

struct PrPoint {
    double confidence = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct PrCurve {
    std::vector<PrPoint> points;  // one per detection, descending confidence
    double ap = 0.0;              // all-points interpolation, monotone envelope
    std::size_t gt_count = 0;
    std::size_t det_count = 0;
    bool defined = true;  // false when neither ground truth nor detections exist
};

// Detections sorted by descending confidence (stable on ties), each matched
// greedily to the unmatched same-class ground truth with highest IoU >=
// threshold within its frame. class_filter empty = aggregate over classes.
PrCurve pr_curve(const std::vector<FrameRecord>& predictions,
                 const std::vector<FrameRecord>& ground_truth,
                 double iou_threshold = 0.5, const std::string& class_filter = "");

std::vector<double> map_iou_thresholds();  // {0.50, 0.55, ..., 0.95}

struct ClassDetEval {
    std::string code;
    double precision = 0.0;  // at conf_threshold / IoU 0.5 operating point
    double recall = 0.0;
    double ap50 = 0.0;
    double ap_range = 0.0;  // mean AP over map_iou_thresholds()
    bool defined = true;
    std::size_t gt_count = 0;
};

struct DetEvalReport {
    std::vector<ClassDetEval> per_class;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double map50 = 0.0;
    double map_range = 0.0;
    std::vector<std::string> confusion_labels;  // classes + "background"
    Matrix confusion;             // raw counts, rows = predicted, cols = true
    Matrix confusion_normalized;  // columns divided by their sums
    std::vector<std::string> warnings;
};

Matrix confusion_matrix(const std::vector<FrameRecord>& predictions,
                        const std::vector<FrameRecord>& ground_truth,
                        const ActionTaxonomy& taxonomy,
                        double conf_threshold = 0.25, double iou_threshold = 0.5,
                        bool normalize = false);

DetEvalReport evaluate_detections(const std::vector<FrameRecord>& predictions,
                                  const std::vector<FrameRecord>& ground_truth,
                                  const ActionTaxonomy& taxonomy,
                                  double conf_threshold = 0.25, double iou_threshold = 0.5);

}  // namespace coact::eval
