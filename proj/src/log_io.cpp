#include "coact/log_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coact {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
    throw std::invalid_argument("detection log line " + std::to_string(line) + ": " + what);
}

double require_number(const ordered_json& j, const char* field, std::size_t line) {
    if (!j.contains(field) || !j[field].is_number())
        line_error(line, std::string("missing or non-numeric field '") + field + "'");
    return j[field].get<double>();
}

std::string require_string(const ordered_json& j, const char* field, std::size_t line) {
    if (!j.contains(field) || !j[field].is_string())
        line_error(line, std::string("missing or non-string field '") + field + "'");
    return j[field].get<std::string>();
}

}  // namespace

std::vector<FrameRecord> parse_detection_log(std::istream& in, const ActionTaxonomy& taxonomy) {
    std::vector<FrameRecord> out;
    std::set<std::tuple<std::string, double, std::string>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;

        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const std::exception& e) {
            line_error(lineno, std::string("malformed record: ") + e.what());
        }
        if (!j.is_object()) line_error(lineno, "record is not an object");

        FrameRecord rec;
        rec.session_id = require_string(j, "session_id", lineno);
        rec.t = require_number(j, "t", lineno);
        rec.source = require_string(j, "source", lineno);
        if (!std::isfinite(rec.t) || rec.t < 0.0) line_error(lineno, "field 't' must be finite and >= 0");

        if (!seen.insert({rec.session_id, rec.t, rec.source}).second)
            line_error(lineno, "duplicate (session_id, t, source) key");

        if (!j.contains("detections") || !j["detections"].is_array())
            line_error(lineno, "missing or non-array field 'detections'");
        for (const auto& dj : j["detections"]) {
            Detection d;
            d.label = require_string(dj, "label", lineno);
            if (!taxonomy.contains(d.label))
                line_error(lineno, "unknown taxonomy code '" + d.label + "'");
            if (dj.contains("confidence")) {
                if (!dj["confidence"].is_number())
                    line_error(lineno, "field 'confidence' must be numeric");
                d.confidence = dj["confidence"].get<double>();
                if (!(*d.confidence >= 0.0 && *d.confidence <= 1.0))
                    line_error(lineno, "field 'confidence' out of [0,1]: " + std::to_string(*d.confidence));
            }
            if (!dj.contains("box") || !dj["box"].is_array() || dj["box"].size() != 4)
                line_error(lineno, "field 'box' must be an array [x1,y1,x2,y2]");
            for (const auto& c : dj["box"])
                if (!c.is_number()) line_error(lineno, "field 'box' must contain numbers");
            d.box = BoundingBox{dj["box"][0].get<double>(), dj["box"][1].get<double>(),
                                dj["box"][2].get<double>(), dj["box"][3].get<double>()};
            try {
                d.box.validate();
            } catch (const std::exception& e) {
                line_error(lineno, std::string("field 'box': ") + e.what());
            }
            rec.detections.push_back(std::move(d));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<FrameRecord> load_detection_log(const std::string& path, const ActionTaxonomy& taxonomy) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open detection log: " + path);
    return parse_detection_log(in, taxonomy);
}

void write_detection_log(std::ostream& out, const std::vector<FrameRecord>& frames) {
    for (const auto& f : frames) {
        ordered_json j;
        j["session_id"] = f.session_id;
        j["t"] = f.t;
        j["source"] = f.source;
        j["detections"] = ordered_json::array();
        for (const auto& d : f.detections) {
            ordered_json dj;
            dj["label"] = d.label;
            if (d.confidence) dj["confidence"] = *d.confidence;
            dj["box"] = {d.box.x1, d.box.y1, d.box.x2, d.box.y2};
            j["detections"].push_back(dj);
        }
        out << j.dump() << "\n";
    }
}

StudyConfig parse_study_config(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("study config: malformed JSON: ") + e.what());
    }

    StudyConfig cfg;
    if (j.contains("taxonomy")) {
        std::vector<std::string> codes;
        for (const auto& c : j["taxonomy"]) codes.push_back(c.get<std::string>());
        cfg.taxonomy = ActionTaxonomy(codes);
    }
    if (j.contains("spaces")) {
        for (const auto& s : j["spaces"]) {
            SpaceCentroid c;
            c.name = s.at("name").get<std::string>();
            c.x = s.at("x").get<double>();
            c.y = s.at("y").get<double>();
            c.zone = zone_from_name(s.at("zone").get<std::string>());
            cfg.spaces.centroids.push_back(c);
        }
        cfg.spaces.validate();
    }
    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        if (t.contains("iou")) cfg.thresholds.iou = t["iou"].get<double>();
        if (t.contains("mask_fraction")) cfg.thresholds.mask_fraction = t["mask_fraction"].get<double>();
        if (t.contains("imbalance_limit")) cfg.thresholds.imbalance_limit = t["imbalance_limit"].get<double>();
    }
    if (j.contains("sessions")) {
        for (const auto& s : j["sessions"]) {
            Session sess;
            sess.session_id = s.at("session_id").get<std::string>();
            sess.scenario = s.value("scenario", std::string{});
            sess.duration_s = s.at("duration_s").get<double>();
            sess.handover_s = s.value("handover_s", 0.0);
            sess.validate();
            cfg.sessions.push_back(sess);
        }
    }
    if (j.contains("rubrics")) {
        for (const auto& r : j["rubrics"]) {
            RubricAssessment a;
            a.session_id = r.at("session_id").get<std::string>();
            const char* keys[6] = {"T1", "T2", "T3", "T4", "T5", "T6"};
            for (int i = 0; i < 6; ++i) a.items[i] = r.at(keys[i]).get<int>();
            a.validate();
            cfg.rubrics.push_back(a);
        }
    }
    return cfg;
}

StudyConfig load_study_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open study config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_study_config(ss.str());
}

std::string zone_name(Zone z) {
    switch (z) {
        case Zone::primary: return "primary";
        case Zone::secondary: return "secondary";
        case Zone::distraction: return "distraction";
        case Zone::transition: return "transition";
    }
    return "primary";
}

Zone zone_from_name(const std::string& name) {
    if (name == "primary") return Zone::primary;
    if (name == "secondary") return Zone::secondary;
    if (name == "distraction") return Zone::distraction;
    if (name == "transition") return Zone::transition;
    throw std::invalid_argument("unknown zone '" + name + "'");
}

std::string dimension_name(Dimension d) {
    return d == Dimension::task ? "task" : "collaboration";
}

Dimension dimension_from_name(const std::string& name) {
    if (name == "task") return Dimension::task;
    if (name == "collaboration") return Dimension::collaboration;
    throw std::invalid_argument("unknown dimension '" + name + "' (task|collaboration)");
}

std::string level_name(Level l) { return l == Level::High ? "High" : "Low"; }

}  // namespace coact
