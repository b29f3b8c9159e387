#include "coact/dtw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "coact/rng.hpp"
#include "coact/stats.hpp"

namespace coact::dtw {

ChannelSeries series_from_timeline(const spatial::TimelineMatrix& tl) {
    ChannelSeries s;
    s.unit_id = tl.unit_id;
    s.channels = tl.codes;
    s.values = Matrix(tl.rows(), tl.codes.size());
    for (std::size_t r = 0; r < tl.rows(); ++r)
        for (std::size_t c = 0; c < tl.codes.size(); ++c)
            s.values(r, c) = static_cast<double>(tl.at(r, c));
    return s;
}

GlobalScaler fit_scaler(const std::vector<ChannelSeries>& sessions) {
    if (sessions.empty()) throw std::invalid_argument("fit_scaler: no sessions");
    const std::size_t d = sessions.front().dims();
    GlobalScaler sc;
    sc.channels = sessions.front().channels;
    sc.means.assign(d, 0.0);
    sc.sds.assign(d, 0.0);
    sc.zero_sd.assign(d, false);

    std::size_t total_rows = 0;
    for (const auto& s : sessions) {
        if (s.dims() != d) throw std::invalid_argument("fit_scaler: channel count mismatch");
        for (std::size_t r = 0; r < s.length(); ++r)
            for (std::size_t c = 0; c < d; ++c) sc.means[c] += s.values(r, c);
        total_rows += s.length();
    }
    if (total_rows == 0) throw std::invalid_argument("fit_scaler: no rows");
    for (double& m : sc.means) m /= static_cast<double>(total_rows);

    for (const auto& s : sessions)
        for (std::size_t r = 0; r < s.length(); ++r)
            for (std::size_t c = 0; c < d; ++c) {
                const double v = s.values(r, c) - sc.means[c];
                sc.sds[c] += v * v;
            }
    for (std::size_t c = 0; c < d; ++c) {
        sc.sds[c] = std::sqrt(sc.sds[c] / static_cast<double>(total_rows));
        if (sc.sds[c] == 0.0) sc.zero_sd[c] = true;
    }
    return sc;
}

ChannelSeries apply_scaler(const ChannelSeries& series, const GlobalScaler& scaler) {
    if (series.dims() != scaler.means.size())
        throw std::invalid_argument("apply_scaler: channel count mismatch");
    ChannelSeries out = series;
    for (std::size_t r = 0; r < out.length(); ++r)
        for (std::size_t c = 0; c < out.dims(); ++c) {
            double v = out.values(r, c) - scaler.means[c];
            if (!scaler.zero_sd[c]) v /= scaler.sds[c];
            out.values(r, c) = v;
        }
    out.scaled = true;
    return out;
}

ChannelSeries invert_scaler(const ChannelSeries& series, const GlobalScaler& scaler) {
    if (series.dims() != scaler.means.size())
        throw std::invalid_argument("invert_scaler: channel count mismatch");
    ChannelSeries out = series;
    for (std::size_t r = 0; r < out.length(); ++r)
        for (std::size_t c = 0; c < out.dims(); ++c) {
            double v = out.values(r, c);
            if (!scaler.zero_sd[c]) v *= scaler.sds[c];
            out.values(r, c) = v + scaler.means[c];
        }
    out.scaled = false;
    return out;
}

ChannelSeries resample(const ChannelSeries& series, std::size_t target_length) {
    if (target_length < 2) throw std::invalid_argument("resample: target length must be >= 2");
    const std::size_t t = series.length();
    if (t < 2) throw std::invalid_argument("resample: series length must be >= 2");
    ChannelSeries out = series;
    out.values = Matrix(target_length, series.dims());
    const double step = static_cast<double>(t - 1) / static_cast<double>(target_length - 1);
    for (std::size_t i = 0; i < target_length; ++i) {
        const double pos = static_cast<double>(i) * step;
        std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        if (lo >= t - 1) lo = t - 2;
        const double frac = pos - static_cast<double>(lo);
        for (std::size_t c = 0; c < series.dims(); ++c) {
            const double a = series.values(lo, c);
            const double b = series.values(lo + 1, c);
            out.values(i, c) = frac == 0.0 ? a : a * (1.0 - frac) + b * frac;
        }
    }
    return out;
}

namespace {

double row_dist2(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) {
        const double d = a(i, c) - b(j, c);
        s += d * d;
    }
    return s;
}

// symmetric Sakoe-Chiba style cell predicate
bool in_band(std::size_t i, std::size_t j, std::size_t la, std::size_t lb, double radius) {
    const double fi = static_cast<double>(i);
    const double fj = static_cast<double>(j);
    const double sa = static_cast<double>(lb) / static_cast<double>(la);
    const double sb = static_cast<double>(la) / static_cast<double>(lb);
    return std::fabs(fi * sa - fj) <= radius || std::fabs(fj * sb - fi) <= radius;
}

DtwResult dtw_impl(const Matrix& a, const Matrix& b, double band_radius, bool squared) {
    if (a.cols != b.cols) throw std::invalid_argument("dtw: channel count mismatch");
    if (a.rows == 0 || b.rows == 0) throw std::invalid_argument("dtw: empty series");
    if (band_radius < 0.0) throw std::invalid_argument("dtw: band radius must be >= 0");
    const double diff = std::fabs(static_cast<double>(a.rows) - static_cast<double>(b.rows));
    if (band_radius < diff)
        throw std::invalid_argument("dtw: infeasible band radius (needs >= |len(a)-len(b)|)");

    const std::size_t n = a.rows;
    const std::size_t m = b.rows;
    const double inf = std::numeric_limits<double>::infinity();
    Matrix dp(n, m, inf);

    // both band conditions are intervals centered at i*m/n, so their union
    // is the wider one; scan that hull (padded one cell) instead of the row
    const double span =
        band_radius * std::max(1.0, static_cast<double>(m) / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double center =
            static_cast<double>(i) * static_cast<double>(m) / static_cast<double>(n);
        const std::size_t jlo =
            center - span <= 1.0 ? 0 : static_cast<std::size_t>(std::floor(center - span)) - 1;
        const std::size_t jhi =
            std::min(m - 1, static_cast<std::size_t>(std::ceil(center + span)) + 1);
        for (std::size_t j = jlo; j <= jhi; ++j) {
            if (!in_band(i, j, n, m, band_radius)) continue;
            double local = row_dist2(a, i, b, j);
            if (!squared) local = std::sqrt(local);
            if (i == 0 && j == 0) {
                dp(i, j) = local;
                continue;
            }
            double best = inf;
            if (i > 0 && j > 0) best = dp(i - 1, j - 1);  // diagonal preferred on ties
            if (i > 0) best = std::min(best, dp(i - 1, j));
            if (j > 0) best = std::min(best, dp(i, j - 1));
            if (best < inf) dp(i, j) = local + best;
        }
    }
    if (!std::isfinite(dp(n - 1, m - 1)))
        throw std::invalid_argument("dtw: band leaves no feasible path");

    DtwResult res;
    res.cost = dp(n - 1, m - 1);

    // traceback, preferring diagonal then (1,0)
    std::size_t i = n - 1, j = m - 1;
    res.path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        const double diag = (i > 0 && j > 0) ? dp(i - 1, j - 1) : inf;
        const double up = i > 0 ? dp(i - 1, j) : inf;
        const double left = j > 0 ? dp(i, j - 1) : inf;
        const double best = std::min(diag, std::min(up, left));
        if (diag == best) {
            --i;
            --j;
        } else if (up == best) {
            --i;
        } else {
            --j;
        }
        res.path.emplace_back(i, j);
    }
    std::reverse(res.path.begin(), res.path.end());
    return res;
}

}  // namespace

DtwResult dtw_distance(const Matrix& a, const Matrix& b, double band_radius) {
    return dtw_impl(a, b, band_radius, /*squared=*/false);
}

DtwResult dtw_alignment_sq(const Matrix& a, const Matrix& b, double band_radius) {
    return dtw_impl(a, b, band_radius, /*squared=*/true);
}

double default_band_radius(std::size_t length, double fraction) {
    return std::ceil(fraction * static_cast<double>(length));
}

BarycenterPrototype dba_barycenter(const std::vector<ChannelSeries>& group,
                                   double band_radius, std::size_t max_iter, double tol) {
    if (group.empty()) throw std::invalid_argument("dba_barycenter: empty group");
    const std::size_t d = group.front().dims();
    for (const auto& s : group)
        if (s.dims() != d) throw std::invalid_argument("dba_barycenter: channel count mismatch");

    // canonical processing order: unit_id, so permuting the input is a no-op
    std::vector<const ChannelSeries*> ordered;
    for (const auto& s : group) ordered.push_back(&s);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ChannelSeries* x, const ChannelSeries* y) { return x->unit_id < y->unit_id; });

    const auto total_cost = [&](const Matrix& center) {
        double sum = 0.0;
        for (const auto* s : ordered) sum += dtw_alignment_sq(center, s->values, band_radius).cost;
        return sum;
    };

    // medoid init; ties by unit_id order (already the iteration order)
    std::size_t medoid = 0;
    double medoid_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const double c = total_cost(ordered[i]->values);
        if (c < medoid_cost) {
            medoid_cost = c;
            medoid = i;
        }
    }

    BarycenterPrototype proto;
    proto.channels = group.front().channels;
    proto.values = ordered[medoid]->values;
    proto.inertia_trace.push_back(medoid_cost);
    proto.iterations = 1;

    if (medoid_cost == 0.0) {
        proto.final_inertia = 0.0;
        return proto;
    }

    const std::size_t l = proto.values.rows;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        Matrix sums(l, d, 0.0);
        std::vector<double> counts(l, 0.0);
        for (const auto* s : ordered) {
            const DtwResult al = dtw_alignment_sq(proto.values, s->values, band_radius);
            for (const auto& [bi, sj] : al.path) {
                for (std::size_t c = 0; c < d; ++c) sums(bi, c) += s->values(sj, c);
                counts[bi] += 1.0;
            }
        }
        Matrix candidate(l, d, 0.0);
        for (std::size_t i = 0; i < l; ++i) {
            if (counts[i] == 0.0) throw std::logic_error("dba_barycenter: unmapped barycenter index");
            for (std::size_t c = 0; c < d; ++c) candidate(i, c) = sums(i, c) / counts[i];
        }

        const double prev = proto.inertia_trace.back();
        const double next = total_cost(candidate);
        if (next > prev) break;  // fp guard; the update cannot increase the objective
        proto.values = std::move(candidate);
        proto.inertia_trace.push_back(next);
        ++proto.iterations;
        if (prev > 0.0 && (prev - next) / prev < tol) break;
        if (next == 0.0) break;
    }
    proto.final_inertia = proto.inertia_trace.back();
    return proto;
}

DifferenceMap difference_map(const BarycenterPrototype& high, const BarycenterPrototype& low) {
    if (high.values.rows != low.values.rows || high.values.cols != low.values.cols)
        throw std::invalid_argument("difference_map: shape mismatch");
    DifferenceMap out;
    out.channels = high.channels;
    out.values = Matrix(high.values.rows, high.values.cols);
    for (std::size_t i = 0; i < high.values.data.size(); ++i)
        out.values.data[i] = high.values.data[i] - low.values.data[i];
    return out;
}

std::vector<double> effect_profile(const DifferenceMap& diff) {
    std::vector<double> out(diff.values.cols, 0.0);
    if (diff.values.rows == 0) return out;
    for (std::size_t r = 0; r < diff.values.rows; ++r)
        for (std::size_t c = 0; c < diff.values.cols; ++c) out[c] += diff.values(r, c);
    for (double& v : out) v /= static_cast<double>(diff.values.rows);
    return out;
}

std::vector<double> group_effect_profile(const std::vector<ChannelSeries>& scaled_sessions,
                                         const std::vector<Level>& labels,
                                         std::size_t length, double band_fraction,
                                         std::size_t dba_max_iter, double dba_tol) {
    std::vector<ChannelSeries> high, low;
    for (std::size_t i = 0; i < scaled_sessions.size(); ++i) {
        auto rs = resample(scaled_sessions[i], length);
        (labels[i] == Level::High ? high : low).push_back(std::move(rs));
    }
    if (high.empty() || low.empty())
        throw std::invalid_argument("group_effect_profile: both groups must be non-empty");
    const double radius = default_band_radius(length, band_fraction);
    BarycenterPrototype ph = dba_barycenter(high, radius, dba_max_iter, dba_tol);
    ph.group = "High";
    BarycenterPrototype pl = dba_barycenter(low, radius, dba_max_iter, dba_tol);
    pl.group = "Low";
    return effect_profile(difference_map(ph, pl));
}

namespace {

// baseline-weighted sign agreement over channels with |baseline| >= threshold
double sign_agreement(const std::vector<double>& replicate, const std::vector<double>& baseline,
                      double sign_threshold) {
    double weight_sum = 0.0;
    double agree_sum = 0.0;
    for (std::size_t c = 0; c < baseline.size(); ++c) {
        const double w = std::fabs(baseline[c]);
        if (w < sign_threshold) continue;
        weight_sum += w;
        const bool same = (baseline[c] > 0.0 && replicate[c] > 0.0) ||
                          (baseline[c] < 0.0 && replicate[c] < 0.0);
        if (same) agree_sum += w;
    }
    return weight_sum > 0.0 ? agree_sum / weight_sum : 0.0;
}

}  // namespace

StabilityComponents stability_components(const std::vector<double>& replicate,
                                         const std::vector<double>& baseline,
                                         double sign_threshold) {
    if (replicate.size() != baseline.size())
        throw std::invalid_argument("stability_components: profile length mismatch");
    StabilityComponents out;
    out.sign_agreement = sign_agreement(replicate, baseline, sign_threshold);
    try {
        out.rho = stats::spearman(replicate, baseline);
    } catch (const std::invalid_argument&) {
        out.rho = 0.0;
    }
    out.score = 0.5 * out.sign_agreement + 0.5 * (out.rho + 1.0) / 2.0;
    return out;
}

LengthSelectionReport select_length(const std::vector<ChannelSeries>& sessions,
                                    const std::vector<Level>& labels,
                                    const std::vector<std::size_t>& candidates,
                                    const LengthSelectionParams& params) {
    if (candidates.empty()) throw std::invalid_argument("select_length: no candidate lengths");
    if (sessions.size() != labels.size()) throw std::invalid_argument("select_length: size mismatch");
    std::vector<std::size_t> high_idx, low_idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == Level::High ? high_idx : low_idx).push_back(i);
    if (high_idx.size() < 2 || low_idx.size() < 2)
        throw std::invalid_argument("select_length: both groups need >= 2 sessions");

    // one global scaler for everything downstream
    const GlobalScaler scaler = fit_scaler(sessions);
    std::vector<ChannelSeries> scaled;
    scaled.reserve(sessions.size());
    for (const auto& s : sessions) scaled.push_back(apply_scaler(s, scaler));

    LengthSelectionReport rep;
    rep.channels = sessions.front().channels;

    std::vector<double> lengths;
    for (const auto& s : sessions) lengths.push_back(static_cast<double>(s.length()));
    rep.baseline_length =
        static_cast<std::size_t>(std::llround(stats::median(lengths)));
    if (rep.baseline_length < 2) rep.baseline_length = 2;

    rep.baseline_profile = group_effect_profile(scaled, labels, rep.baseline_length,
                                                params.band_fraction, params.dba_max_iter,
                                                params.dba_tol);
    bool any_stable = false;
    for (double v : rep.baseline_profile)
        if (std::fabs(v) >= params.sign_threshold) any_stable = true;
    if (!any_stable)
        throw std::invalid_argument("select_length: no stable channels (all baseline effects below threshold)");

    const std::size_t b = params.bootstrap_replicates;
    const std::size_t tasks = candidates.size() * b;
    std::vector<double> scores(tasks, 0.0);
    std::vector<double> signs(tasks, 0.0);
    std::vector<double> rhos(tasks, 0.0);

    const auto run_task = [&](std::size_t task) {
        const std::size_t ci = task / b;
        const std::size_t rep_i = task % b;
        Rng rng(derive_seed(params.seed, 0x64747762ULL + ci, rep_i));

        std::vector<ChannelSeries> sample;
        std::vector<Level> sample_labels;
        sample.reserve(sessions.size());
        for (std::size_t i = 0; i < high_idx.size(); ++i) {
            sample.push_back(scaled[high_idx[rng.index(high_idx.size())]]);
            sample_labels.push_back(Level::High);
        }
        for (std::size_t i = 0; i < low_idx.size(); ++i) {
            sample.push_back(scaled[low_idx[rng.index(low_idx.size())]]);
            sample_labels.push_back(Level::Low);
        }
        // bootstrap can repeat unit_ids; disambiguate so DBA ordering stays total
        for (std::size_t i = 0; i < sample.size(); ++i)
            sample[i].unit_id += "#" + std::to_string(i);

        const auto profile = group_effect_profile(sample, sample_labels, candidates[ci],
                                                  params.band_fraction, params.dba_max_iter,
                                                  params.dba_tol);
        const StabilityComponents sc =
            stability_components(profile, rep.baseline_profile, params.sign_threshold);
        signs[task] = sc.sign_agreement;
        rhos[task] = sc.rho;
        scores[task] = sc.score;
    };

    const std::size_t threads = std::max<std::size_t>(1, params.threads);
    if (threads == 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&]() {
                for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) run_task(t);
            });
        for (auto& th : pool) th.join();
    }

    double best_mean = -1.0;
    double best_se = 0.0;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        CandidateStability cs;
        cs.length = candidates[ci];
        double sum = 0.0, sum_sign = 0.0, sum_rho = 0.0;
        for (std::size_t r = 0; r < b; ++r) {
            sum += scores[ci * b + r];
            sum_sign += signs[ci * b + r];
            sum_rho += rhos[ci * b + r];
        }
        cs.mean = sum / static_cast<double>(b);
        cs.mean_sign_agreement = sum_sign / static_cast<double>(b);
        cs.mean_rho = sum_rho / static_cast<double>(b);
        double ss = 0.0;
        for (std::size_t r = 0; r < b; ++r) {
            const double dv = scores[ci * b + r] - cs.mean;
            ss += dv * dv;
        }
        cs.se = b > 1 ? std::sqrt(ss / static_cast<double>(b - 1)) / std::sqrt(static_cast<double>(b))
                      : 0.0;
        rep.candidates.push_back(cs);
        if (cs.mean > best_mean) {
            best_mean = cs.mean;
            best_se = cs.se;
            rep.best_length = cs.length;
        }
    }

    const double cutoff = best_mean - best_se;
    std::vector<CandidateStability> by_length = rep.candidates;
    std::sort(by_length.begin(), by_length.end(),
              [](const CandidateStability& a, const CandidateStability& c) { return a.length < c.length; });
    for (const auto& cs : by_length) {
        if (cs.mean >= cutoff) {
            rep.chosen_length = cs.length;
            break;
        }
    }
    return rep;
}

}  // namespace coact::dtw
