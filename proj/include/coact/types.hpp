#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coact {

// Pixel-space box, image convention: y grows downward. x2 > x1, y2 > y1.
struct BoundingBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x1 + x2); }
    double cy() const { return 0.5 * (y1 + y2); }

    void validate() const {
        if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2)))
            throw std::invalid_argument("bounding box: coordinates must be finite");
        if (x1 < 0.0 || y1 < 0.0)
            throw std::invalid_argument("bounding box: coordinates must be >= 0");
        if (!(x2 > x1) || !(y2 > y1))
            throw std::invalid_argument("bounding box: requires x2 > x1 and y2 > y1");
    }
};

// One labelled box. confidence is absent for human annotations.
struct Detection {
    std::string label;
    std::optional<double> confidence;
    BoundingBox box;
};

struct FrameRecord {
    std::string session_id;
    double t = 0.0;  // seconds from session start
    std::string source;  // annotator id or "model"
    std::vector<Detection> detections;
};

// Ordered action codes. Order is significant: it fixes binary coding positions.
class ActionTaxonomy {
public:
    ActionTaxonomy() : codes_(default_codes()) {}
    explicit ActionTaxonomy(std::vector<std::string> codes) : codes_(std::move(codes)) {
        if (codes_.empty()) throw std::invalid_argument("taxonomy: must not be empty");
        for (std::size_t i = 0; i < codes_.size(); ++i)
            for (std::size_t j = i + 1; j < codes_.size(); ++j)
                if (codes_[i] == codes_[j])
                    throw std::invalid_argument("taxonomy: duplicate code '" + codes_[i] + "'");
    }

    static std::vector<std::string> default_codes() {
        return {"Using Computer", "Doc/Note Interaction", "Using Phone",
                "Medi/Equip Interaction", "Sitting", "Patient Interaction", "Other"};
    }

    const std::vector<std::string>& codes() const { return codes_; }
    std::size_t size() const { return codes_.size(); }

    bool contains(const std::string& code) const {
        for (const auto& c : codes_)
            if (c == code) return true;
        return false;
    }

    std::size_t index_of(const std::string& code) const {
        for (std::size_t i = 0; i < codes_.size(); ++i)
            if (codes_[i] == code) return i;
        throw std::invalid_argument("taxonomy: unknown code '" + code + "'");
    }

private:
    std::vector<std::string> codes_;
};

struct Session {
    std::string session_id;
    std::string scenario;
    double duration_s = 0.0;
    double handover_s = 0.0;

    void validate() const {
        if (!(duration_s > 0.0)) throw std::invalid_argument("session " + session_id + ": duration_s must be > 0");
        if (handover_s < 0.0) throw std::invalid_argument("session " + session_id + ": handover_s must be >= 0");
        if (!(handover_s < duration_s))
            throw std::invalid_argument("session " + session_id + ": handover_s must be < duration_s");
    }
};

enum class Zone { primary, secondary, distraction, transition };

std::string zone_name(Zone z);
Zone zone_from_name(const std::string& name);

struct SpaceCentroid {
    std::string name;
    double x = 0.0;
    double y = 0.0;
    Zone zone = Zone::primary;
};

struct SpaceMap {
    std::vector<SpaceCentroid> centroids;

    void validate() const {
        if (centroids.empty()) throw std::invalid_argument("space map: must not be empty");
        bool has_primary = false;
        for (std::size_t i = 0; i < centroids.size(); ++i) {
            if (centroids[i].zone == Zone::primary) has_primary = true;
            for (std::size_t j = i + 1; j < centroids.size(); ++j)
                if (centroids[i].name == centroids[j].name)
                    throw std::invalid_argument("space map: duplicate centroid name '" + centroids[i].name + "'");
        }
        if (!has_primary) throw std::invalid_argument("space map: needs at least one primary-zone centroid");
    }
};

// Six-item teacher rubric, each on a 1..7 Likert scale.
struct RubricAssessment {
    std::string session_id;
    int items[6] = {0, 0, 0, 0, 0, 0};  // T1..T6

    void validate() const {
        for (int v : items)
            if (v < 1 || v > 7)
                throw std::invalid_argument("rubric " + session_id + ": items must be in [1,7]");
    }
};

enum class Dimension { task, collaboration };
enum class Level { High, Low };

std::string dimension_name(Dimension d);
Dimension dimension_from_name(const std::string& name);
std::string level_name(Level l);

struct PerformanceGroup {
    Dimension dimension = Dimension::task;
    Level level = Level::Low;
    double mean_score = 0.0;
    // Set when the mean falls in the open (3,4) gap the integer bands leave undefined.
    bool boundary = false;
};

struct Thresholds {
    double iou = 0.5;
    double mask_fraction = 0.20;
    double imbalance_limit = 5.0;
};

struct StudyConfig {
    ActionTaxonomy taxonomy;
    SpaceMap spaces;
    Thresholds thresholds;
    std::vector<Session> sessions;
    std::vector<RubricAssessment> rubrics;

    const Session* find_session(const std::string& id) const {
        for (const auto& s : sessions)
            if (s.session_id == id) return &s;
        return nullptr;
    }
    const RubricAssessment* find_rubric(const std::string& id) const {
        for (const auto& r : rubrics)
            if (r.session_id == id) return &r;
        return nullptr;
    }
};

}  // namespace coact
