#include "coact/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coact/dtw.hpp"
#include "coact/ena.hpp"
#include "coact/eval.hpp"
#include "coact/geometry.hpp"
#include "coact/log_io.hpp"
#include "coact/sampling.hpp"
#include "coact/spatial.hpp"
#include "coact/stats.hpp"
#include "coact/svg.hpp"
#include "coact/types.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace coact::cli {

std::string format_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot write to " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

namespace {

struct CommonState {
    StudyConfig config;
    bool config_loaded = false;
};

StudyConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return StudyConfig{};
    return load_study_config(path);
}

void require_file(const std::string& path, const std::string& what) {
    if (!fs::exists(path)) throw std::invalid_argument(what + " not found: " + path);
}

std::string config_echo_line(const ordered_json& cfg) {
    return "# config: " + cfg.dump();
}

std::string tool_line(const std::string& subcommand) {
    return std::string("# ") + kToolVersion + " " + subcommand;
}

// --- timelines directory helpers ---

std::vector<spatial::TimelineMatrix> load_timelines_dir(const std::string& dir) {
    require_file(dir, "timelines directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::invalid_argument("no timeline CSVs in " + dir);
    std::vector<spatial::TimelineMatrix> out;
    for (const auto& f : files) out.push_back(spatial::load_timeline_csv(f.string(), f.stem().string()));
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].codes != out[0].codes)
            throw std::invalid_argument("timeline code lists differ between " + files[0].string() +
                                        " and " + files[i].string());
    return out;
}

struct GroupAssignment {
    std::vector<Level> labels;  // aligned with the timeline list
    std::vector<bool> boundary;
    std::vector<std::string> warnings;
};

GroupAssignment assign_groups(const std::vector<spatial::TimelineMatrix>& timelines,
                              const StudyConfig& config, Dimension dim) {
    GroupAssignment out;
    for (const auto& tl : timelines) {
        const RubricAssessment* rubric = config.find_rubric(tl.unit_id);
        if (!rubric)
            throw std::invalid_argument("no rubric for session '" + tl.unit_id + "' in study config");
        const PerformanceGroup g = performance_group(*rubric, dim);
        out.labels.push_back(g.level);
        out.boundary.push_back(g.boundary);
        if (g.boundary)
            out.warnings.push_back("session '" + tl.unit_id + "' has boundary mean score " +
                                   format_double(g.mean_score, 3) + " in the (3,4) gap");
    }
    return out;
}

// --- subcommand implementations ---

int run_irr(const std::string& a_path, const std::string& b_path, const std::string& config_path,
            double iou_thr, const std::string& out_path) {
    require_file(a_path, "log A");
    require_file(b_path, "log B");
    const StudyConfig cfg = load_config_or_default(config_path);
    const auto frames_a = load_detection_log(a_path, cfg.taxonomy);
    const auto frames_b = load_detection_log(b_path, cfg.taxonomy);
    const eval::IrrReport rep = eval::irr_report(frames_a, frames_b, cfg.taxonomy, iou_thr);

    std::ostringstream out;
    out << "class,TP,FP,FN,P,R,F1\n";
    const auto row = [&](const std::string& name, const eval::PrfCounts& c) {
        out << name << "," << c.tp << "," << c.fp << "," << c.fn << ","
            << format_double(c.precision, 3) << "," << format_double(c.recall, 3) << ","
            << format_double(c.f1, 3) << "\n";
    };
    row("Overall", rep.overall);
    for (std::size_t i = 0; i < rep.classes.size(); ++i) row(rep.classes[i], rep.per_class[i]);
    out << "# summary\n";
    out << "kappa,mean_iou,kappa_gate,miou_gate,frames\n";
    out << format_double(rep.kappa, 3) << "," << format_double(rep.mean_iou, 3) << ","
        << (rep.kappa_gate ? "pass" : "fail") << "," << (rep.miou_gate ? "pass" : "fail") << ","
        << rep.frames_compared << "\n";
    out << tool_line("irr") << "\n";
    ordered_json echo{{"a", a_path}, {"b", b_path}, {"iou", iou_thr}};
    out << config_echo_line(echo) << "\n";
    for (const auto& w : rep.warnings) out << "# warning: " << w << "\n";
    atomic_write(out_path, out.str());
    return 0;
}

int run_eval_det(const std::string& pred_path, const std::string& gt_path,
                 const std::string& config_path, double conf_thr, double iou_thr,
                 const std::string& out_path, const std::string& svg_path,
                 const std::string& confusion_svg_path) {
    require_file(pred_path, "predictions log");
    require_file(gt_path, "ground-truth log");
    const StudyConfig cfg = load_config_or_default(config_path);
    const auto pred = load_detection_log(pred_path, cfg.taxonomy);
    const auto gt = load_detection_log(gt_path, cfg.taxonomy);
    const eval::DetEvalReport rep = eval::evaluate_detections(pred, gt, cfg.taxonomy, conf_thr, iou_thr);

    std::ostringstream out;
    out << "class,P,R,AP50,AP50_95,gt_count\n";
    for (const auto& c : rep.per_class) {
        if (!c.defined) {
            out << c.code << ",,,,," << c.gt_count << "\n";
            continue;
        }
        out << c.code << "," << format_double(c.precision) << "," << format_double(c.recall) << ","
            << format_double(c.ap50) << "," << format_double(c.ap_range) << "," << c.gt_count << "\n";
    }
    out << "mean," << format_double(rep.mean_precision) << "," << format_double(rep.mean_recall)
        << "," << format_double(rep.map50) << "," << format_double(rep.map_range) << ",\n";
    out << "# confusion (rows = predicted, cols = true, column-normalized)\n";
    out << "predicted";
    for (const auto& l : rep.confusion_labels) out << "," << l;
    out << "\n";
    for (std::size_t r = 0; r < rep.confusion_normalized.rows; ++r) {
        out << rep.confusion_labels[r];
        for (std::size_t c = 0; c < rep.confusion_normalized.cols; ++c)
            out << "," << format_double(rep.confusion_normalized(r, c));
        out << "\n";
    }
    const eval::PrCurve aggregated = eval::pr_curve(pred, gt, iou_thr);
    out << "# pr_curve (aggregated, AP=" << format_double(aggregated.ap) << ")\n";
    out << "confidence,precision,recall\n";
    for (const auto& p : aggregated.points)
        out << format_double(p.confidence) << "," << format_double(p.precision) << ","
            << format_double(p.recall) << "\n";
    out << tool_line("eval-det") << "\n";
    ordered_json echo{{"pred", pred_path}, {"gt", gt_path}, {"conf", conf_thr}, {"iou", iou_thr}};
    out << config_echo_line(echo) << "\n";
    for (const auto& w : rep.warnings) out << "# warning: " << w << "\n";
    atomic_write(out_path, out.str());

    if (!svg_path.empty())
        atomic_write(svg_path, svg::pr_curve_chart(aggregated.points, aggregated.ap,
                                                   "Precision-Recall (aggregated)"));
    if (!confusion_svg_path.empty())
        atomic_write(confusion_svg_path,
                     svg::confusion_heatmap(rep.confusion_normalized, rep.confusion_labels));
    return 0;
}

int run_assign_spaces(const std::string& log_path, const std::string& config_path,
                      const std::string& out_path) {
    require_file(log_path, "detection log");
    const StudyConfig cfg = load_config_or_default(config_path);
    cfg.spaces.validate();
    const auto frames = load_detection_log(log_path, cfg.taxonomy);
    const auto code_set = spatial::default_spatial_codes(cfg.taxonomy);

    std::ostringstream out;
    for (const auto& f : frames) {
        ordered_json j;
        j["session_id"] = f.session_id;
        j["t"] = f.t;
        j["source"] = f.source;
        j["assignments"] = ordered_json::array();
        for (const auto& d : f.detections) {
            const SpaceCentroid& c = spatial::assign_space(d.box, cfg.spaces);
            const auto code = spatial::spatial_code(d.label, c.zone, cfg.taxonomy, code_set);
            ordered_json a;
            a["label"] = d.label;
            a["centroid"] = c.name;
            a["zone"] = zone_name(c.zone);
            if (code)
                a["spatial_code"] = *code;
            else
                a["spatial_code"] = nullptr;  // filtered (Sitting)
            j["assignments"].push_back(a);
        }
        out << j.dump() << "\n";
    }
    atomic_write(out_path, out.str());
    return 0;
}

int run_timeline(const std::string& log_path, const std::string& config_path,
                 const std::string& mode_name, const std::string& out_path) {
    require_file(log_path, "detection log");
    const StudyConfig cfg = load_config_or_default(config_path);
    const spatial::TimelineMode mode =
        mode_name == "plain" ? spatial::TimelineMode::plain : spatial::TimelineMode::spatial;
    if (mode_name != "plain" && mode_name != "spatial")
        throw std::invalid_argument("timeline: mode must be plain|spatial");
    if (mode == spatial::TimelineMode::spatial) cfg.spaces.validate();

    const auto frames = load_detection_log(log_path, cfg.taxonomy);
    std::map<std::string, std::vector<FrameRecord>> by_session;
    for (const auto& f : frames) by_session[f.session_id].push_back(f);
    for (auto& [id, fr] : by_session)
        std::stable_sort(fr.begin(), fr.end(),
                         [](const FrameRecord& a, const FrameRecord& b) { return a.t < b.t; });

    const bool single_csv = out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv";
    if (single_csv && by_session.size() != 1)
        throw std::invalid_argument("timeline: --out names a .csv but the log holds " +
                                    std::to_string(by_session.size()) + " sessions; pass a directory");

    for (const auto& [id, fr] : by_session) {
        const spatial::TimelineMatrix tl = spatial::build_timeline(fr, mode, cfg.taxonomy, cfg.spaces);
        std::ostringstream os;
        spatial::write_timeline_csv(os, tl);
        const std::string path = single_csv ? out_path : (fs::path(out_path) / (id + ".csv")).string();
        atomic_write(path, os.str());
    }
    if (!single_csv) {
        ordered_json manifest;
        manifest["tool"] = kToolVersion;
        manifest["subcommand"] = "timeline";
        manifest["config"] = {{"log", log_path}, {"mode", mode_name}};
        manifest["sessions"] = ordered_json::array();
        for (const auto& [id, fr] : by_session) manifest["sessions"].push_back(id);
        atomic_write((fs::path(out_path) / "manifest.json").string(), manifest.dump(2) + "\n");
    }
    return 0;
}

int run_ena(const std::string& timelines_dir, const std::string& config_path,
            const std::string& dimension_name_arg, std::size_t window, std::size_t residual_dims,
            const std::string& out_path, const std::string& svg_path) {
    require_file(config_path, "study config");
    const StudyConfig cfg = load_study_config(config_path);
    const Dimension dim = dimension_from_name(dimension_name_arg);
    const auto timelines = load_timelines_dir(timelines_dir);
    const GroupAssignment groups = assign_groups(timelines, cfg, dim);

    std::vector<ena::ConnectionVector> vectors;
    std::vector<std::string> warnings = groups.warnings;
    for (const auto& tl : timelines) {
        auto cv = ena::sphere_normalize(ena::accumulate_connections(tl, window));
        if (cv.zero_flagged)
            warnings.push_back("unit '" + tl.unit_id + "' has no co-occurrences; zero vector kept");
        vectors.push_back(std::move(cv));
    }

    const ena::EnaSpace space = ena::means_rotation(vectors, groups.labels, residual_dims);
    const ena::GroupNetworks nets = ena::group_networks(vectors, groups.labels);
    const ena::ProjectionComparison cmp = ena::compare_projection(space, 1);

    ordered_json j;
    j["tool"] = kToolVersion;
    j["subcommand"] = "ena";
    j["config"] = {{"timelines", timelines_dir}, {"dimension", dimension_name_arg},
                   {"window", window},           {"residual_dims", residual_dims}};
    j["units"] = ordered_json::array();
    for (std::size_t i = 0; i < space.unit_ids.size(); ++i) {
        ordered_json u;
        u["unit_id"] = space.unit_ids[i];
        u["group"] = level_name(space.labels[i]);
        u["boundary"] = groups.boundary[i];
        u["coords"] = space.points[i];
        j["units"].push_back(u);
    }
    j["comparison"] = {{"dim", cmp.dim},
                       {"U", cmp.mw.u},
                       {"p_raw", cmp.mw.p_raw},
                       {"r", cmp.mw.r},
                       {"method", cmp.mw.method},
                       {"median_high", cmp.median_high},
                       {"median_low", cmp.median_low},
                       {"n_high", cmp.n_high},
                       {"n_low", cmp.n_low}};
    j["residual_singular_values"] = space.singular_values;
    j["edges"] = ordered_json::array();
    const auto pairs = ena::pair_order(nets.high.nodes.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        ordered_json e;
        e["a"] = nets.high.nodes[pairs[p].first];
        e["b"] = nets.high.nodes[pairs[p].second];
        e["high"] = nets.high.edge_weights[p];
        e["low"] = nets.low.edge_weights[p];
        e["difference"] = nets.difference.edge_weights[p];
        j["edges"].push_back(e);
    }
    for (const auto& w : cmp.mw.warnings) warnings.push_back(w);
    j["warnings"] = warnings;
    atomic_write(out_path, j.dump(2) + "\n");

    if (!svg_path.empty()) atomic_write(svg_path, svg::network_panels(nets));
    return 0;
}

int run_dtw(const std::string& timelines_dir, const std::string& config_path,
            const std::string& dimension_name_arg, const std::vector<std::size_t>& lengths,
            double band_fraction, std::size_t bootstrap, double sign_threshold,
            std::uint64_t seed, const std::string& out_path, const std::string& svg_path) {
    require_file(config_path, "study config");
    const StudyConfig cfg = load_study_config(config_path);
    const Dimension dim = dimension_from_name(dimension_name_arg);
    const auto timelines = load_timelines_dir(timelines_dir);
    const GroupAssignment groups = assign_groups(timelines, cfg, dim);

    std::vector<dtw::ChannelSeries> sessions;
    for (const auto& tl : timelines) sessions.push_back(dtw::series_from_timeline(tl));

    dtw::LengthSelectionParams params;
    params.bootstrap_replicates = bootstrap;
    params.sign_threshold = sign_threshold;
    params.band_fraction = band_fraction;
    params.seed = seed;
    if (const char* env = std::getenv("COACT_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) params.threads = static_cast<std::size_t>(n);
    }

    const dtw::LengthSelectionReport sel = dtw::select_length(sessions, groups.labels, lengths, params);

    // full-data prototypes at the chosen length
    const dtw::GlobalScaler scaler = dtw::fit_scaler(sessions);
    std::vector<dtw::ChannelSeries> high, low;
    std::vector<std::string> warnings = groups.warnings;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        auto scaled = dtw::apply_scaler(sessions[i], scaler);
        auto rs = dtw::resample(scaled, sel.chosen_length);
        (groups.labels[i] == Level::High ? high : low).push_back(std::move(rs));
    }
    const double radius = dtw::default_band_radius(sel.chosen_length, band_fraction);
    dtw::BarycenterPrototype ph = dtw::dba_barycenter(high, radius);
    ph.group = "High";
    dtw::BarycenterPrototype pl = dtw::dba_barycenter(low, radius);
    pl.group = "Low";
    const dtw::DifferenceMap dmap = dtw::difference_map(ph, pl);
    const std::vector<double> profile = dtw::effect_profile(dmap);

    for (std::size_t c = 0; c < scaler.channels.size(); ++c)
        if (scaler.zero_sd[c])
            warnings.push_back("channel '" + scaler.channels[c] + "' has zero pooled sd; centered only");

    ordered_json j;
    j["tool"] = kToolVersion;
    j["subcommand"] = "dtw";
    j["config"] = {{"timelines", timelines_dir},
                   {"dimension", dimension_name_arg},
                   {"lengths", lengths},
                   {"band_fraction", band_fraction},
                   {"bootstrap", bootstrap},
                   {"sign_threshold", sign_threshold},
                   {"seed", seed},
                   {"threads", params.threads}};
    j["scaler"] = {{"channels", scaler.channels}, {"means", scaler.means}, {"sds", scaler.sds}};
    ordered_json selj;
    selj["baseline_length"] = sel.baseline_length;
    selj["chosen_length"] = sel.chosen_length;
    selj["best_length"] = sel.best_length;
    selj["baseline_profile"] = ordered_json::object();
    for (std::size_t c = 0; c < sel.channels.size(); ++c)
        selj["baseline_profile"][sel.channels[c]] = sel.baseline_profile[c];
    selj["candidates"] = ordered_json::array();
    for (const auto& cs : sel.candidates) {
        selj["candidates"].push_back({{"length", cs.length},
                                      {"stability_mean", cs.mean},
                                      {"stability_se", cs.se},
                                      {"sign_agreement", cs.mean_sign_agreement},
                                      {"spearman", cs.mean_rho}});
    }
    j["length_selection"] = selj;

    const auto matrix_json = [](const Matrix& m) {
        ordered_json rows = ordered_json::array();
        for (std::size_t r = 0; r < m.rows; ++r) {
            ordered_json row = ordered_json::array();
            for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
            rows.push_back(row);
        }
        return rows;
    };
    j["prototypes"] = {{"length", sel.chosen_length},
                       {"channels", ph.channels},
                       {"high", matrix_json(ph.values)},
                       {"low", matrix_json(pl.values)},
                       {"difference", matrix_json(dmap.values)},
                       {"high_inertia_trace", ph.inertia_trace},
                       {"low_inertia_trace", pl.inertia_trace}};
    j["effect_profile"] = ordered_json::object();
    for (std::size_t c = 0; c < dmap.channels.size(); ++c)
        j["effect_profile"][dmap.channels[c]] = profile[c];
    j["warnings"] = warnings;
    atomic_write(out_path, j.dump(2) + "\n");

    if (!svg_path.empty())
        atomic_write(svg_path, svg::heatmap_triptych(ph.values, pl.values, dmap.values, dmap.channels));
    return 0;
}

int run_stats(const std::string& timelines_dir, const std::string& config_path,
              const std::string& mode_name, const std::string& dimension_name_arg,
              std::size_t permutations, std::uint64_t seed, const std::string& adjust_name,
              const std::string& out_path) {
    require_file(config_path, "study config");
    const StudyConfig cfg = load_study_config(config_path);
    const Dimension dim = dimension_from_name(dimension_name_arg);
    const auto timelines = load_timelines_dir(timelines_dir);
    const GroupAssignment groups = assign_groups(timelines, cfg, dim);

    std::vector<std::string> warnings = groups.warnings;
    if (!mode_name.empty()) {
        const auto expected = mode_name == "spatial"
                                  ? spatial::default_spatial_codes(cfg.taxonomy)
                                  : [&] {
                                        std::vector<std::string> v;
                                        for (const auto& c : cfg.taxonomy.codes())
                                            if (c != "Sitting") v.push_back(c);
                                        return v;
                                    }();
        if (timelines[0].codes != expected)
            warnings.push_back("timeline codes do not match declared mode '" + mode_name + "'");
    }

    // feature = per-session fraction of active seconds per code
    const auto& codes = timelines[0].codes;
    std::vector<std::vector<double>> features;
    for (const auto& tl : timelines) features.push_back(tl.activation_fractions());

    std::vector<double> raw_p;
    struct Row {
        std::string code;
        double u, p_raw, r, mean_high, mean_low;
        std::string method;
    };
    std::vector<Row> rows;
    for (std::size_t c = 0; c < codes.size(); ++c) {
        std::vector<double> hi, lo;
        for (std::size_t i = 0; i < features.size(); ++i)
            (groups.labels[i] == Level::High ? hi : lo).push_back(features[i][c]);
        if (hi.empty() || lo.empty())
            throw std::invalid_argument("stats: both groups must be non-empty");
        const stats::MannWhitneyResult mw = stats::mann_whitney(hi, lo);
        Row row;
        row.code = codes[c];
        row.u = mw.u;
        row.p_raw = mw.p_raw;
        row.r = mw.r;
        row.mean_high = stats::mean(hi);
        row.mean_low = stats::mean(lo);
        row.method = mw.method;
        rows.push_back(row);
        raw_p.push_back(mw.p_raw);
        for (const auto& w : mw.warnings) warnings.push_back("code '" + codes[c] + "': " + w);
    }
    const stats::AdjustedPValues adj = adjust_name == "bonferroni"
                                           ? stats::bonferroni_adjust(raw_p)
                                           : stats::holm_adjust(raw_p);

    std::vector<int> labels_int;
    for (const Level l : groups.labels) labels_int.push_back(l == Level::High ? 0 : 1);
    const stats::PermanovaResult pm = stats::permanova(features, labels_int, permutations, seed);

    std::ostringstream out;
    out << "code,U,p_raw,p_adj,r,mean_high,mean_low\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << rows[i].code << "," << format_double(rows[i].u) << "," << format_double(rows[i].p_raw)
            << "," << format_double(adj.adjusted[i]) << "," << format_double(rows[i].r) << ","
            << format_double(rows[i].mean_high) << "," << format_double(rows[i].mean_low) << "\n";
    }
    {
        std::string approx_codes;
        for (const auto& r : rows)
            if (r.method != "exact") approx_codes += (approx_codes.empty() ? "" : " ") + r.code;
        if (!approx_codes.empty())
            out << "# normal-approximation p (ties or n > 12): " << approx_codes << "\n";
    }
    out << "# permanova\n";
    out << "pseudo_F,p,permutations,exact,SS_total,SS_within,SS_between\n";
    out << format_double(pm.pseudo_f) << "," << format_double(pm.p) << "," << pm.permutations << ","
        << (pm.exact ? "yes" : "no") << "," << format_double(pm.ss_total) << ","
        << format_double(pm.ss_within) << "," << format_double(pm.ss_between) << "\n";
    out << tool_line("stats") << "\n";
    ordered_json echo{{"timelines", timelines_dir}, {"mode", mode_name},
                      {"dimension", dimension_name_arg}, {"permutations", permutations},
                      {"seed", seed}, {"adjust", adjust_name}};
    out << config_echo_line(echo) << "\n";
    for (const auto& w : warnings) out << "# warning: " << w << "\n";
    atomic_write(out_path, out.str());
    return 0;
}

int run_sample_frames(const std::string& config_path, double interval, const std::string& out_path) {
    require_file(config_path, "study config");
    const StudyConfig cfg = load_study_config(config_path);
    if (cfg.sessions.empty()) throw std::invalid_argument("sample-frames: config has no sessions");
    std::ostringstream out;
    out << "session_id,t\n";
    for (const auto& s : cfg.sessions)
        for (const double t : plan_frame_samples(s, interval))
            out << s.session_id << "," << format_double(t, 3) << "\n";
    out << tool_line("sample-frames") << "\n";
    ordered_json echo{{"config", config_path}, {"interval", interval}};
    out << config_echo_line(echo) << "\n";
    atomic_write(out_path, out.str());
    return 0;
}

int run_split(const std::string& instances_path, const std::string& ratios_arg,
              std::uint64_t seed, const std::string& out_path) {
    require_file(instances_path, "instances csv");
    std::ifstream in(instances_path);
    std::vector<std::pair<std::string, std::string>> instances;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("id,", 0) == 0) {
            first = false;
            continue;  // header
        }
        first = false;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("split: instances csv rows must be 'id,class'");
        instances.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    if (instances.empty()) throw std::invalid_argument("split: no instances");

    std::array<double, 3> ratios{0.70, 0.20, 0.10};
    {
        std::stringstream ss(ratios_arg);
        std::string field;
        std::size_t i = 0;
        while (std::getline(ss, field, ',') && i < 3) ratios[i++] = std::stod(field);
        if (i != 3) throw std::invalid_argument("split: --ratios needs three comma-separated values");
    }

    const SplitResult split = stratified_split(instances, ratios, seed);
    std::map<std::string, std::string> assignment;
    for (const auto& id : split.train) assignment[id] = "train";
    for (const auto& id : split.validation) assignment[id] = "validation";
    for (const auto& id : split.test) assignment[id] = "test";

    std::map<std::string, std::size_t> counts;
    for (const auto& [id, cls] : instances) ++counts[cls];
    const ImbalanceResult imb = imbalance_ratio(counts);

    std::ostringstream out;
    out << "id,class,split\n";
    for (const auto& [id, cls] : instances) out << id << "," << cls << "," << assignment[id] << "\n";
    out << "# summary\n";
    out << "imbalance_ratio,imbalance_flag\n";
    out << format_double(imb.ratio, 3) << "," << (imb.flag ? "true" : "false") << "\n";
    out << tool_line("split") << "\n";
    ordered_json echo{{"instances", instances_path}, {"ratios", ratios_arg}, {"seed", seed}};
    out << config_echo_line(echo) << "\n";
    for (const auto& w : split.warnings) out << "# warning: " << w << "\n";
    atomic_write(out_path, out.str());
    return 0;
}

int run_mask(const std::string& log_path, const std::string& config_path, double fraction,
             const std::string& out_path) {
    require_file(log_path, "detection log");
    const StudyConfig cfg = load_config_or_default(config_path);
    const double frac = fraction > 0.0 ? fraction : cfg.thresholds.mask_fraction;
    const auto frames = load_detection_log(log_path, cfg.taxonomy);
    std::ostringstream out;
    out << "session_id,t,source,label,x1,y1,x2,y2\n";
    for (const auto& f : frames)
        for (const auto& d : f.detections) {
            const BoundingBox m = mask_region(d.box, frac);
            out << f.session_id << "," << format_double(f.t, 3) << "," << f.source << "," << d.label
                << "," << format_double(m.x1, 2) << "," << format_double(m.y1, 2) << ","
                << format_double(m.x2, 2) << "," << format_double(m.y2, 2) << "\n";
        }
    out << tool_line("mask") << "\n";
    ordered_json echo{{"log", log_path}, {"fraction", frac}};
    out << config_echo_line(echo) << "\n";
    atomic_write(out_path, out.str());
    return 0;
}

int run_report(const std::string& dir, const std::string& out_path) {
    require_file(dir, "run directory");
    ordered_json j;
    j["tool"] = kToolVersion;
    j["subcommand"] = "report";
    j["run_dir"] = dir;
    j["artifacts"] = ordered_json::object();
    j["warnings"] = ordered_json::array();

    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());

    for (const auto& f : files) {
        const std::string rel = fs::relative(f, dir).string();
        const std::string ext = f.extension().string();
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        const std::string content = ss.str();
        if (ext == ".json") {
            ordered_json parsed = ordered_json::parse(content);
            j["artifacts"][rel] = parsed;
            if (parsed.contains("warnings"))
                for (const auto& w : parsed["warnings"]) j["warnings"].push_back(rel + ": " + w.get<std::string>());
        } else if (ext == ".csv") {
            j["artifacts"][rel] = content;
            std::istringstream lines(content);
            std::string line;
            while (std::getline(lines, line))
                if (line.rfind("# warning: ", 0) == 0) j["warnings"].push_back(rel + ": " + line.substr(11));
        } else if (ext == ".svg") {
            j["artifacts"][rel] = ordered_json{{"kind", "svg"}, {"bytes", content.size()}};
        }
    }
    atomic_write(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"coact: classroom action-log analytics"};
    app.require_subcommand(1);

    // irr
    std::string irr_a, irr_b, irr_cfg, irr_out = "irr.csv";
    double irr_iou = 0.5;
    auto* irr = app.add_subcommand("irr", "inter-rater reliability report");
    irr->add_option("--a", irr_a, "rater A detection log")->required();
    irr->add_option("--b", irr_b, "rater B detection log")->required();
    irr->add_option("--config", irr_cfg, "study config (default taxonomy if omitted)");
    irr->add_option("--iou", irr_iou, "IoU matching threshold");
    irr->add_option("--out", irr_out, "output csv");

    // eval-det
    std::string ed_pred, ed_gt, ed_cfg, ed_out = "det.csv", ed_svg, ed_conf_svg;
    double ed_conf = 0.25, ed_iou = 0.5;
    auto* ed = app.add_subcommand("eval-det", "detector evaluation (PR, AP, confusion)");
    ed->add_option("--pred", ed_pred, "predictions log")->required();
    ed->add_option("--gt", ed_gt, "ground-truth log")->required();
    ed->add_option("--config", ed_cfg, "study config");
    ed->add_option("--conf", ed_conf, "confidence threshold for confusion/PR operating point");
    ed->add_option("--iou", ed_iou, "IoU threshold");
    ed->add_option("--out", ed_out, "output csv");
    ed->add_option("--svg", ed_svg, "PR-curve svg");
    ed->add_option("--confusion-svg", ed_conf_svg, "confusion-matrix svg");

    // assign-spaces
    std::string as_log, as_cfg, as_out = "coded.jsonl";
    auto* as = app.add_subcommand("assign-spaces", "nearest-centroid space assignment");
    as->add_option("--log", as_log, "detection log")->required();
    as->add_option("--config", as_cfg, "study config with spaces")->required();
    as->add_option("--out", as_out, "output jsonl");

    // timeline
    std::string tl_log, tl_cfg, tl_mode = "spatial", tl_out = "timelines";
    auto* tl = app.add_subcommand("timeline", "per-second binary behavior timelines");
    tl->add_option("--log", tl_log, "detection log")->required();
    tl->add_option("--config", tl_cfg, "study config");
    tl->add_option("--mode", tl_mode, "plain|spatial");
    tl->add_option("--out", tl_out, "output dir (or .csv for a single session)");

    // ena
    std::string ena_dir, ena_cfg, ena_dim = "task", ena_out = "ena.json", ena_svg;
    std::size_t ena_window = 6, ena_resid = 1;
    auto* en = app.add_subcommand("ena", "epistemic network analysis");
    en->add_option("--timelines", ena_dir, "timeline csv directory")->required();
    en->add_option("--config,--groups", ena_cfg, "study config with rubrics")->required();
    en->add_option("--dimension", ena_dim, "task|collaboration");
    en->add_option("--window", ena_window, "moving stanza window");
    en->add_option("--residual-dims", ena_resid, "residual SVD dimensions");
    en->add_option("--out", ena_out, "output json");
    en->add_option("--svg", ena_svg, "network svg");

    // dtw
    std::string dtw_dir, dtw_cfg, dtw_dim = "task", dtw_out = "dtw.json", dtw_svg, dtw_lengths = "100,200,300";
    double dtw_band = 0.1, dtw_sign = 0.1;
    std::size_t dtw_boot = 200;
    std::uint64_t dtw_seed = 0;
    auto* dt = app.add_subcommand("dtw", "DTW-barycenter temporal prototypes");
    dt->add_option("--timelines", dtw_dir, "timeline csv directory")->required();
    dt->add_option("--config,--groups", dtw_cfg, "study config with rubrics")->required();
    dt->add_option("--dimension", dtw_dim, "task|collaboration");
    dt->add_option("--lengths", dtw_lengths, "comma-separated candidate target lengths");
    dt->add_option("--band", dtw_band, "Sakoe-Chiba band radius as fraction of length");
    dt->add_option("--boot", dtw_boot, "bootstrap replicates");
    dt->add_option("--sign-threshold", dtw_sign, "minimum |baseline effect| for sign agreement");
    dt->add_option("--seed", dtw_seed, "random seed");
    dt->add_option("--out", dtw_out, "output json");
    dt->add_option("--svg", dtw_svg, "heatmap triptych svg");

    // stats
    std::string st_dir, st_cfg, st_mode = "spatial", st_dim = "task", st_adjust = "holm",
                st_out = "stats.csv";
    std::size_t st_perm = 999;
    std::uint64_t st_seed = 0;
    auto* st = app.add_subcommand("stats", "Mann-Whitney per code + PERMANOVA");
    st->add_option("--timelines", st_dir, "timeline csv directory")->required();
    st->add_option("--config,--groups", st_cfg, "study config with rubrics")->required();
    st->add_option("--mode", st_mode, "plain|spatial (echoed; codes come from the timelines)");
    st->add_option("--dimension", st_dim, "task|collaboration");
    st->add_option("--permutations", st_perm, "PERMANOVA permutations");
    st->add_option("--seed", st_seed, "random seed");
    st->add_option("--adjust", st_adjust, "holm|bonferroni");
    st->add_option("--out", st_out, "output csv");

    // sample-frames
    std::string sf_cfg, sf_out = "samples.csv";
    double sf_interval = 10.0;
    auto* sf = app.add_subcommand("sample-frames", "uniform frame sampling plan");
    sf->add_option("--config", sf_cfg, "study config with sessions")->required();
    sf->add_option("--interval", sf_interval, "sampling interval, seconds");
    sf->add_option("--out", sf_out, "output csv");

    // split
    std::string sp_instances, sp_ratios = "0.7,0.2,0.1", sp_out = "splits.csv";
    std::uint64_t sp_seed = 0;
    auto* sp = app.add_subcommand("split", "stratified train/validation/test split");
    sp->add_option("--instances", sp_instances, "csv of id,class rows")->required();
    sp->add_option("--ratios", sp_ratios, "three comma-separated ratios");
    sp->add_option("--seed", sp_seed, "random seed");
    sp->add_option("--out", sp_out, "output csv");

    // mask
    std::string mk_log, mk_cfg, mk_out = "masks.csv";
    double mk_fraction = 0.0;
    auto* mk = app.add_subcommand("mask", "privacy-mask geometry for all boxes");
    mk->add_option("--log", mk_log, "detection log")->required();
    mk->add_option("--config", mk_cfg, "study config");
    mk->add_option("--fraction", mk_fraction, "mask fraction (default from config, 0.20)");
    mk->add_option("--out", mk_out, "output csv");

    // report
    std::string rp_dir, rp_out = "report.json";
    auto* rp = app.add_subcommand("report", "aggregate a run directory into one report");
    rp->add_option("--dir", rp_dir, "run directory")->required();
    rp->add_option("--out", rp_out, "output json");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (irr->parsed()) return run_irr(irr_a, irr_b, irr_cfg, irr_iou, irr_out);
        if (ed->parsed())
            return run_eval_det(ed_pred, ed_gt, ed_cfg, ed_conf, ed_iou, ed_out, ed_svg, ed_conf_svg);
        if (as->parsed()) return run_assign_spaces(as_log, as_cfg, as_out);
        if (tl->parsed()) return run_timeline(tl_log, tl_cfg, tl_mode, tl_out);
        if (en->parsed())
            return run_ena(ena_dir, ena_cfg, ena_dim, ena_window, ena_resid, ena_out, ena_svg);
        if (dt->parsed()) {
            std::vector<std::size_t> lengths;
            std::stringstream ss(dtw_lengths);
            std::string field;
            while (std::getline(ss, field, ',')) lengths.push_back(std::stoul(field));
            return run_dtw(dtw_dir, dtw_cfg, dtw_dim, lengths, dtw_band, dtw_boot, dtw_sign,
                           dtw_seed, dtw_out, dtw_svg);
        }
        if (st->parsed())
            return run_stats(st_dir, st_cfg, st_mode, st_dim, st_perm, st_seed, st_adjust, st_out);
        if (sf->parsed()) return run_sample_frames(sf_cfg, sf_interval, sf_out);
        if (sp->parsed()) return run_split(sp_instances, sp_ratios, sp_seed, sp_out);
        if (mk->parsed()) return run_mask(mk_log, mk_cfg, mk_fraction, mk_out);
        if (rp->parsed()) return run_report(rp_dir, rp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace coact::cli
