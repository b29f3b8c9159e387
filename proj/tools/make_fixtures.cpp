// Generates the bundled fixtures under data/: the two-annotator reliability
// fixture (exact per-class TP/FP/FN), an 8-session synthetic detection
// corpus with rubrics, a detector-evaluation fixture, and a split demo.
// Deterministic for a fixed seed; run once and commit the output.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coact/log_io.hpp"
#include "coact/rng.hpp"
#include "coact/types.hpp"

using nlohmann::ordered_json;
using namespace coact;

namespace {

struct ClassCounts {
    std::string label;
    int tp;
    int fp;
    int fn;
};

// per-class agreement counts; overall 399/31/26
const std::vector<ClassCounts> kIrrCounts = {
    {"Using Computer", 50, 1, 2}, {"Doc/Note Interaction", 14, 2, 1},
    {"Medi/Equip Interaction", 41, 5, 2}, {"Patient Interaction", 69, 12, 4},
    {"Using Phone", 17, 2, 1}, {"Sitting", 44, 0, 0}, {"Other", 164, 9, 16},
};

void write_irr_fixture(const std::filesystem::path& dir) {
    struct Slot {
        std::string label;
        int kind;  // 0 = both, 1 = A only (FN), 2 = B only (FP)
    };
    std::vector<Slot> slots;
    for (const auto& c : kIrrCounts) {
        for (int i = 0; i < c.tp; ++i) slots.push_back({c.label, 0});
        for (int i = 0; i < c.fn; ++i) slots.push_back({c.label, 1});
        for (int i = 0; i < c.fp; ++i) slots.push_back({c.label, 2});
    }

    const int frames = 100;
    std::vector<FrameRecord> a(frames), b(frames);
    for (int f = 0; f < frames; ++f) {
        a[f].session_id = b[f].session_id = "irr_pilot";
        a[f].t = b[f].t = static_cast<double>(f);
        a[f].source = "rater_a";
        b[f].source = "rater_b";
    }
    for (std::size_t g = 0; g < slots.size(); ++g) {
        const int frame = static_cast<int>(g % frames);
        const int pos = static_cast<int>(g / frames);
        BoundingBox box{30.0 + 130.0 * pos, 40.0, 90.0 + 130.0 * pos, 140.0};
        Detection d{slots[g].label, std::nullopt, box};
        if (slots[g].kind != 2) a[frame].detections.push_back(d);
        if (slots[g].kind != 1) b[frame].detections.push_back(d);
    }

    std::ofstream fa(dir / "irr_rater_a.jsonl");
    write_detection_log(fa, a);
    std::ofstream fb(dir / "irr_rater_b.jsonl");
    write_detection_log(fb, b);
}

struct SessionSpec {
    std::string id;
    double duration;
    double handover;
    int task[3];
    int collab[3];
};

const std::vector<SessionSpec> kSessions = {
    {"s01", 320, 30, {6, 5, 7}, {6, 6, 5}}, {"s02", 280, 25, {5, 6, 6}, {5, 7, 6}},
    {"s03", 350, 40, {7, 6, 6}, {2, 3, 2}}, {"s04", 300, 20, {6, 7, 5}, {3, 2, 1}},
    {"s05", 260, 30, {2, 1, 3}, {5, 6, 6}}, {"s06", 330, 35, {1, 2, 2}, {6, 5, 7}},
    {"s07", 290, 25, {2, 3, 1}, {2, 1, 3}}, {"s08", 310, 30, {3, 4, 3}, {1, 2, 2}},
};

void write_study_config(const std::filesystem::path& dir) {
    ordered_json j;
    j["taxonomy"] = ActionTaxonomy::default_codes();
    j["spaces"] = ordered_json::array();
    const auto space = [&](const char* name, double x, double y, const char* zone) {
        j["spaces"].push_back({{"name", name}, {"x", x}, {"y", y}, {"zone", zone}});
    };
    space("Bed 4", 1100, 260, "primary");
    space("MET Phone", 1180, 430, "primary");
    space("Bed 1", 200, 250, "secondary");
    space("Bed 2", 480, 250, "secondary");
    space("IV 1", 320, 520, "secondary");
    space("IV 2", 620, 520, "secondary");
    space("Bed 3", 820, 250, "distraction");
    space("Corridor A", 660, 400, "transition");
    space("Corridor B", 930, 450, "transition");
    j["thresholds"] = {{"iou", 0.5}, {"mask_fraction", 0.20}, {"imbalance_limit", 5.0}};
    j["sessions"] = ordered_json::array();
    j["rubrics"] = ordered_json::array();
    for (const auto& s : kSessions) {
        j["sessions"].push_back({{"session_id", s.id},
                                 {"scenario", "A"},
                                 {"duration_s", s.duration},
                                 {"handover_s", s.handover}});
        j["rubrics"].push_back({{"session_id", s.id},
                                {"T1", s.task[0]},
                                {"T2", s.task[1]},
                                {"T3", s.task[2]},
                                {"T4", s.collab[0]},
                                {"T5", s.collab[1]},
                                {"T6", s.collab[2]}});
    }
    std::ofstream out(dir / "study_config.json");
    out << j.dump(2) << "\n";
}

BoundingBox box_near(Rng& rng, double cx, double cy) {
    const double jx = (rng.uniform() - 0.5) * 120.0;
    const double jy = (rng.uniform() - 0.5) * 80.0;
    const double w = 46.0 + rng.uniform() * 30.0;
    const double h = 90.0 + rng.uniform() * 40.0;
    const double x1 = std::max(0.0, cx + jx - w / 2.0);
    const double y1 = std::max(0.0, cy + jy - h / 2.0);
    return BoundingBox{x1, y1, x1 + w, y1 + h};
}

std::vector<FrameRecord> make_session_frames(const SessionSpec& spec, Rng& rng) {
    const bool high_task = (spec.task[0] + spec.task[1] + spec.task[2]) / 3.0 >= 3.5;
    std::vector<FrameRecord> frames;
    for (double t = spec.handover; t < spec.duration; t += 1.0) {
        const double p = (t - spec.handover) / (spec.duration - spec.handover);
        FrameRecord fr;
        fr.session_id = spec.id;
        fr.t = t;
        fr.source = "model";

        const auto add = [&](const std::string& label, double cx, double cy) {
            Detection d;
            d.label = label;
            d.confidence = 0.55 + 0.4 * rng.uniform();
            d.box = box_near(rng, cx, cy);
            fr.detections.push_back(d);
        };

        if (high_task) {
            if (rng.uniform() < 0.20 + 0.55 * p) add("Patient Interaction", 1100, 260);
            if (rng.uniform() < 0.15 + 0.45 * p) add("Medi/Equip Interaction", 1100, 260);
            if (rng.uniform() < 0.50 - 0.30 * p) add("Using Computer", 1100, 260);
            if (rng.uniform() < 0.35) add("Doc/Note Interaction", 1100, 260);
            if (rng.uniform() < 0.08) add("Using Phone", 1180, 430);
            if (rng.uniform() < 0.18) add("Other", 660, 400);
        } else {
            const bool phone_window = p >= 0.15 && p <= 0.55;
            if (rng.uniform() < (phone_window ? 0.60 : 0.12)) add("Using Phone", 1180, 430);
            if (rng.uniform() < 0.15 + 0.30 * p) add("Patient Interaction", 1100, 260);
            if (rng.uniform() < 0.10 + 0.20 * p) add("Medi/Equip Interaction", 1100, 260);
            if (rng.uniform() < 0.30) add("Using Computer", 480, 250);
            if (rng.uniform() < 0.20) add("Doc/Note Interaction", 820, 250);
            if (rng.uniform() < 0.30) add("Other", 930, 450);
        }
        if (rng.uniform() < 0.15) add("Sitting", 820, 250);

        frames.push_back(std::move(fr));
    }
    return frames;
}

void write_sessions_log(const std::filesystem::path& dir, std::uint64_t seed) {
    std::vector<FrameRecord> all;
    for (std::size_t i = 0; i < kSessions.size(); ++i) {
        Rng rng(derive_seed(seed, 0x73657373ULL, i));
        auto frames = make_session_frames(kSessions[i], rng);
        all.insert(all.end(), frames.begin(), frames.end());
    }
    std::ofstream out(dir / "sessions.jsonl");
    write_detection_log(out, all);
}

void write_det_fixture(const std::filesystem::path& dir, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x64657466ULL));
    const auto codes = ActionTaxonomy::default_codes();
    std::vector<FrameRecord> gt, pred;
    for (int f = 0; f < 40; ++f) {
        FrameRecord g, p;
        g.session_id = p.session_id = "det_fixture";
        g.t = p.t = static_cast<double>(f);
        g.source = "annotator";
        p.source = "model";
        const int objects = 2 + static_cast<int>(rng.index(3));
        for (int o = 0; o < objects; ++o) {
            const std::string label = codes[rng.index(codes.size())];
            const double cx = 120.0 + 250.0 * o + rng.uniform() * 40.0;
            const double cy = 150.0 + rng.uniform() * 250.0;
            const BoundingBox box = box_near(rng, cx, cy);
            g.detections.push_back({label, std::nullopt, box});

            const double roll = rng.uniform();
            if (roll < 0.80) {
                // detected: jitter the box, usually the right label
                BoundingBox jb = box;
                const double dx = (rng.uniform() - 0.5) * 0.3 * (box.x2 - box.x1);
                const double dy = (rng.uniform() - 0.5) * 0.3 * (box.y2 - box.y1);
                jb.x1 = std::max(0.0, jb.x1 + dx);
                jb.x2 += dx;
                jb.y1 = std::max(0.0, jb.y1 + dy);
                jb.y2 += dy;
                const std::string plabel = rng.uniform() < 0.9 ? label : codes[rng.index(codes.size())];
                p.detections.push_back({plabel, 0.45 + 0.5 * rng.uniform(), jb});
            }
        }
        if (rng.uniform() < 0.35) {
            // spurious detection
            const std::string label = codes[rng.index(codes.size())];
            p.detections.push_back({label, 0.3 + 0.4 * rng.uniform(), box_near(rng, 1300.0, 500.0)});
        }
        gt.push_back(std::move(g));
        pred.push_back(std::move(p));
    }
    std::ofstream fg(dir / "det_gt.jsonl");
    write_detection_log(fg, gt);
    std::ofstream fp(dir / "det_pred.jsonl");
    write_detection_log(fp, pred);
}

void write_split_fixture(const std::filesystem::path& dir) {
    const std::vector<std::pair<std::string, int>> counts = {
        {"Using Computer", 20}, {"Doc/Note Interaction", 6}, {"Using Phone", 4},
        {"Medi/Equip Interaction", 10}, {"Sitting", 5}, {"Patient Interaction", 12}, {"Other", 30}};
    std::ofstream out(dir / "instances.csv");
    out << "id,class\n";
    int n = 0;
    for (const auto& [cls, count] : counts)
        for (int i = 0; i < count; ++i) {
            char id[16];
            std::snprintf(id, sizeof(id), "img%03d", n++);
            out << id << "," << cls << "\n";
        }
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path dir = "data";
    std::uint64_t seed = 11;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) dir = argv[++i];
        if (arg == "--seed" && i + 1 < argc) seed = std::stoull(argv[++i]);
    }
    std::filesystem::create_directories(dir);
    write_irr_fixture(dir);
    write_study_config(dir);
    write_sessions_log(dir, seed);
    write_det_fixture(dir, seed);
    write_split_fixture(dir);
    std::cout << "fixtures written to " << dir.string() << "\n";
    return 0;
}
