#include "coact/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "coact/geometry.hpp"

namespace coact::eval {

namespace {

using FrameKey = std::pair<std::string, double>;

std::map<FrameKey, const FrameRecord*> index_frames(const std::vector<FrameRecord>& frames) {
    std::map<FrameKey, const FrameRecord*> out;
    for (const auto& f : frames) {
        auto [it, inserted] = out.emplace(FrameKey{f.session_id, f.t}, &f);
        if (!inserted)
            throw std::invalid_argument("duplicate frame key (" + f.session_id + ", t=" +
                                        std::to_string(f.t) + ") within one log");
    }
    return out;
}

}  // namespace

MatchResult match_instances(const std::vector<Detection>& a, const std::vector<Detection>& b,
                            double iou_threshold, bool class_agnostic) {
    struct Candidate {
        double iou;
        std::size_t ia;
        std::size_t ib;
    };
    std::vector<Candidate> candidates;
    for (std::size_t ia = 0; ia < a.size(); ++ia) {
        for (std::size_t ib = 0; ib < b.size(); ++ib) {
            if (!class_agnostic && a[ia].label != b[ib].label) continue;
            const double v = iou(a[ia].box, b[ib].box);
            if (v >= iou_threshold) candidates.push_back({v, ia, ib});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
        if (l.iou != r.iou) return l.iou > r.iou;
        if (l.ia != r.ia) return l.ia < r.ia;
        return l.ib < r.ib;
    });

    MatchResult res;
    std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
    for (const auto& c : candidates) {
        if (used_a[c.ia] || used_b[c.ib]) continue;
        used_a[c.ia] = true;
        used_b[c.ib] = true;
        res.pairs.push_back({c.ia, c.ib, c.iou});
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!used_a[i]) res.unmatched_a.push_back(i);
    for (std::size_t i = 0; i < b.size(); ++i)
        if (!used_b[i]) res.unmatched_b.push_back(i);
    return res;
}

KappaResult cohen_kappa(const std::vector<std::pair<std::string, std::string>>& label_pairs) {
    if (label_pairs.empty()) throw std::invalid_argument("cohen_kappa: needs at least one pair");
    const double n = static_cast<double>(label_pairs.size());
    std::map<std::string, double> marg_a, marg_b;
    double agree = 0.0;
    for (const auto& [la, lb] : label_pairs) {
        marg_a[la] += 1.0;
        marg_b[lb] += 1.0;
        if (la == lb) agree += 1.0;
    }
    const double p_o = agree / n;
    double p_e = 0.0;
    for (const auto& [label, ca] : marg_a) {
        auto it = marg_b.find(label);
        if (it != marg_b.end()) p_e += (ca / n) * (it->second / n);
    }
    KappaResult res;
    if (p_e >= 1.0 - 1e-12) {
        res.kappa = 1.0;
        res.degenerate_marginals = true;
        return res;
    }
    res.kappa = (p_o - p_e) / (1.0 - p_e);
    return res;
}

void PrfCounts::finalize() {
    precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

IrrReport irr_report(const std::vector<FrameRecord>& frames_a,
                     const std::vector<FrameRecord>& frames_b,
                     const ActionTaxonomy& taxonomy, double iou_threshold) {
    const auto idx_a = index_frames(frames_a);
    const auto idx_b = index_frames(frames_b);

    IrrReport rep;
    rep.classes = taxonomy.codes();
    rep.per_class.assign(rep.classes.size(), PrfCounts{});

    std::vector<std::pair<std::string, std::string>> kappa_pairs;
    double iou_sum = 0.0;
    std::size_t iou_n = 0;
    std::size_t only_a = 0, only_b = 0;

    for (const auto& [key, fa] : idx_a) {
        auto it = idx_b.find(key);
        if (it == idx_b.end()) {
            ++only_a;
            continue;
        }
        const FrameRecord* fb = it->second;
        ++rep.frames_compared;

        const MatchResult m = match_instances(fa->detections, fb->detections, iou_threshold,
                                              /*class_agnostic=*/true);
        for (const auto& pr : m.pairs) {
            const std::string& la = fa->detections[pr.index_a].label;
            const std::string& lb = fb->detections[pr.index_b].label;
            kappa_pairs.emplace_back(la, lb);
            iou_sum += pr.iou;
            ++iou_n;
            if (la == lb) {
                ++rep.per_class[taxonomy.index_of(la)].tp;
            } else {
                ++rep.per_class[taxonomy.index_of(lb)].fp;
                ++rep.per_class[taxonomy.index_of(la)].fn;
            }
        }
        for (std::size_t ia : m.unmatched_a) ++rep.per_class[taxonomy.index_of(fa->detections[ia].label)].fn;
        for (std::size_t ib : m.unmatched_b) ++rep.per_class[taxonomy.index_of(fb->detections[ib].label)].fp;
    }
    for (const auto& [key, fb] : idx_b)
        if (idx_a.find(key) == idx_a.end()) ++only_b;

    if (rep.frames_compared == 0) throw std::invalid_argument("irr_report: no frames in common");
    if (only_a > 0)
        rep.warnings.push_back(std::to_string(only_a) + " frame(s) present only in log A were skipped");
    if (only_b > 0)
        rep.warnings.push_back(std::to_string(only_b) + " frame(s) present only in log B were skipped");

    for (auto& c : rep.per_class) {
        rep.overall.tp += c.tp;
        rep.overall.fp += c.fp;
        rep.overall.fn += c.fn;
        c.finalize();
    }
    rep.overall.finalize();

    if (!kappa_pairs.empty()) {
        const KappaResult k = cohen_kappa(kappa_pairs);
        rep.kappa = k.kappa;
        rep.kappa_degenerate = k.degenerate_marginals;
        if (k.degenerate_marginals)
            rep.warnings.push_back("kappa marginals degenerate (both raters constant); kappa = 1 by convention");
    } else {
        rep.warnings.push_back("no matched pairs; kappa and mean IoU undefined, reported as 0");
    }
    rep.mean_iou = iou_n > 0 ? iou_sum / static_cast<double>(iou_n) : 0.0;
    rep.kappa_gate = rep.kappa >= 0.80;
    rep.miou_gate = rep.mean_iou >= 0.70;
    return rep;
}

namespace {

struct RankedDetection {
    double confidence = 0.0;
    std::size_t frame = 0;  // index into joined frame list
    std::size_t det = 0;    // index within frame
};

struct JoinedFrame {
    const FrameRecord* pred = nullptr;
    const FrameRecord* gt = nullptr;
};

std::vector<JoinedFrame> join_frames(const std::vector<FrameRecord>& predictions,
                                     const std::vector<FrameRecord>& ground_truth) {
    const auto idx_p = index_frames(predictions);
    const auto idx_g = index_frames(ground_truth);
    std::set<FrameKey> keys;
    for (const auto& [k, v] : idx_p) keys.insert(k);
    for (const auto& [k, v] : idx_g) keys.insert(k);
    std::vector<JoinedFrame> out;
    for (const auto& k : keys) {
        JoinedFrame jf;
        auto ip = idx_p.find(k);
        if (ip != idx_p.end()) jf.pred = ip->second;
        auto ig = idx_g.find(k);
        if (ig != idx_g.end()) jf.gt = ig->second;
        out.push_back(jf);
    }
    return out;
}

}  // namespace

PrCurve pr_curve(const std::vector<FrameRecord>& predictions,
                 const std::vector<FrameRecord>& ground_truth,
                 double iou_threshold, const std::string& class_filter) {
    index_frames(predictions);  // key-uniqueness check
    const auto idx_g = index_frames(ground_truth);

    const auto class_ok = [&](const std::string& label) {
        return class_filter.empty() || label == class_filter;
    };

    PrCurve curve;
    // ranked in prediction-log input order so confidence ties stay stable
    std::vector<RankedDetection> dets;
    for (std::size_t fi = 0; fi < predictions.size(); ++fi) {
        const auto& ds = predictions[fi].detections;
        for (std::size_t di = 0; di < ds.size(); ++di) {
            if (!class_ok(ds[di].label)) continue;
            if (!ds[di].confidence)
                throw std::invalid_argument("pr_curve: detection without confidence");
            dets.push_back({*ds[di].confidence, fi, di});
        }
    }
    for (const auto& f : ground_truth)
        for (const auto& d : f.detections)
            if (class_ok(d.label)) ++curve.gt_count;

    curve.det_count = dets.size();
    if (curve.gt_count == 0 && curve.det_count == 0) {
        curve.defined = false;
        return curve;
    }

    std::stable_sort(dets.begin(), dets.end(), [](const RankedDetection& a, const RankedDetection& b) {
        return a.confidence > b.confidence;
    });

    std::map<const FrameRecord*, std::vector<bool>> gt_used;
    for (const auto& [key, gf] : idx_g) gt_used[gf].assign(gf->detections.size(), false);

    std::size_t tp = 0, fp = 0;
    for (const auto& rd : dets) {
        const FrameRecord& pf = predictions[rd.frame];
        const Detection& det = pf.detections[rd.det];
        const FrameRecord* gf = nullptr;
        auto git = idx_g.find(FrameKey{pf.session_id, pf.t});
        if (git != idx_g.end()) gf = git->second;

        double best_iou = 0.0;
        std::size_t best_gt = 0;
        bool found = false;
        if (gf) {
            auto& used = gt_used[gf];
            const auto& gts = gf->detections;
            for (std::size_t gi = 0; gi < gts.size(); ++gi) {
                if (used[gi]) continue;
                if (gts[gi].label != det.label) continue;
                const double v = iou(det.box, gts[gi].box);
                if (v >= iou_threshold && v > best_iou) {
                    best_iou = v;
                    best_gt = gi;
                    found = true;
                }
            }
        }
        if (found) {
            gt_used[gf][best_gt] = true;
            ++tp;
        } else {
            ++fp;
        }
        PrPoint pt;
        pt.confidence = rd.confidence;
        pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        pt.recall = curve.gt_count > 0
                        ? static_cast<double>(tp) / static_cast<double>(curve.gt_count)
                        : 0.0;
        curve.points.push_back(pt);
    }

    // all-points AP: monotone precision envelope integrated over recall
    if (curve.gt_count == 0) {
        curve.ap = 0.0;  // detections with no ground truth: all false positives
        return curve;
    }
    std::vector<double> env(curve.points.size());
    for (std::size_t i = curve.points.size(); i-- > 0;) {
        env[i] = curve.points[i].precision;
        if (i + 1 < curve.points.size()) env[i] = std::max(env[i], env[i + 1]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        ap += (curve.points[i].recall - prev_recall) * env[i];
        prev_recall = curve.points[i].recall;
    }
    curve.ap = ap;
    return curve;
}

std::vector<double> map_iou_thresholds() {
    std::vector<double> out;
    for (int i = 0; i < 10; ++i) out.push_back(0.50 + 0.05 * i);
    return out;
}

Matrix confusion_matrix(const std::vector<FrameRecord>& predictions,
                        const std::vector<FrameRecord>& ground_truth,
                        const ActionTaxonomy& taxonomy,
                        double conf_threshold, double iou_threshold, bool normalize) {
    const std::size_t k = taxonomy.size();
    Matrix m(k + 1, k + 1, 0.0);  // rows predicted (+background), cols true (+background)
    const auto frames = join_frames(predictions, ground_truth);

    for (const auto& jf : frames) {
        std::vector<Detection> preds;
        if (jf.pred)
            for (const auto& d : jf.pred->detections)
                if (d.confidence.value_or(1.0) >= conf_threshold) preds.push_back(d);
        std::vector<Detection> gts;
        if (jf.gt) gts = jf.gt->detections;

        const MatchResult mr = match_instances(preds, gts, iou_threshold, /*class_agnostic=*/true);
        for (const auto& pr : mr.pairs)
            m(taxonomy.index_of(preds[pr.index_a].label), taxonomy.index_of(gts[pr.index_b].label)) += 1.0;
        for (std::size_t ip : mr.unmatched_a) m(taxonomy.index_of(preds[ip].label), k) += 1.0;
        for (std::size_t ig : mr.unmatched_b) m(k, taxonomy.index_of(gts[ig].label)) += 1.0;
    }

    if (normalize) {
        for (std::size_t c = 0; c <= k; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r <= k; ++r) sum += m(r, c);
            if (sum > 0.0)
                for (std::size_t r = 0; r <= k; ++r) m(r, c) /= sum;
        }
    }
    return m;
}

DetEvalReport evaluate_detections(const std::vector<FrameRecord>& predictions,
                                  const std::vector<FrameRecord>& ground_truth,
                                  const ActionTaxonomy& taxonomy,
                                  double conf_threshold, double iou_threshold) {
    DetEvalReport rep;
    const auto thresholds = map_iou_thresholds();

    // operating-point counts for P/R from the confusion matching
    const Matrix counts = confusion_matrix(predictions, ground_truth, taxonomy,
                                           conf_threshold, iou_threshold, /*normalize=*/false);
    const std::size_t k = taxonomy.size();

    double sum_p = 0.0, sum_r = 0.0, sum_ap50 = 0.0, sum_apr = 0.0;
    std::size_t defined = 0;
    for (std::size_t ci = 0; ci < k; ++ci) {
        ClassDetEval ce;
        ce.code = taxonomy.codes()[ci];

        const PrCurve at50 = pr_curve(predictions, ground_truth, iou_threshold, ce.code);
        ce.gt_count = at50.gt_count;
        ce.defined = at50.defined;
        if (!ce.defined) {
            rep.per_class.push_back(ce);
            rep.warnings.push_back("class '" + ce.code + "' absent from ground truth and detections; excluded from means");
            continue;
        }
        ce.ap50 = at50.ap;
        double apr = 0.0;
        for (double thr : thresholds) apr += pr_curve(predictions, ground_truth, thr, ce.code).ap;
        ce.ap_range = apr / static_cast<double>(thresholds.size());

        // row ci of counts = predictions of this class; col ci = ground truth
        double row_sum = 0.0, col_sum = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            row_sum += counts(ci, j);
            col_sum += counts(j, ci);
        }
        const double tp = counts(ci, ci);
        ce.precision = row_sum > 0.0 ? tp / row_sum : 0.0;
        ce.recall = col_sum > 0.0 ? tp / col_sum : 0.0;

        sum_p += ce.precision;
        sum_r += ce.recall;
        sum_ap50 += ce.ap50;
        sum_apr += ce.ap_range;
        ++defined;
        rep.per_class.push_back(ce);
    }
    if (defined > 0) {
        const double dn = static_cast<double>(defined);
        rep.mean_precision = sum_p / dn;
        rep.mean_recall = sum_r / dn;
        rep.map50 = sum_ap50 / dn;
        rep.map_range = sum_apr / dn;
    }

    rep.confusion_labels = taxonomy.codes();
    rep.confusion_labels.push_back("background");
    rep.confusion = counts;
    rep.confusion_normalized = confusion_matrix(predictions, ground_truth, taxonomy,
                                                conf_threshold, iou_threshold, /*normalize=*/true);
    return rep;
}

}  // namespace coact::eval
