#include "coact/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace coact::spatial {

const SpaceCentroid& assign_space(const BoundingBox& box, const SpaceMap& map) {
    map.validate();
    box.validate();
    const double mx = box.cx();
    const double my = box.cy();
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < map.centroids.size(); ++i) {
        const double dx = map.centroids[i].x - mx;
        const double dy = map.centroids[i].y - my;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {  // strict: earlier centroid wins ties
            best_d2 = d2;
            best = i;
        }
    }
    return map.centroids[best];
}

std::string spatial_code_name(const std::string& prefix, const std::string& action) {
    std::string base = action;
    std::replace(base.begin(), base.end(), ' ', '_');
    return prefix + "_" + base;
}

std::vector<std::string> default_spatial_codes(const ActionTaxonomy& taxonomy) {
    std::vector<std::string> out;
    for (const auto& code : taxonomy.codes()) {
        if (code == "Sitting") continue;
        out.push_back(spatial_code_name("prim", code));
    }
    for (const auto& code : taxonomy.codes()) {
        if (code == "Sitting" || code == "Using Phone") continue;
        out.push_back(spatial_code_name("sec", code));
    }
    return out;
}

std::optional<std::string> spatial_code(const std::string& action, Zone zone,
                                        const ActionTaxonomy& taxonomy,
                                        const std::vector<std::string>& code_set) {
    if (!taxonomy.contains(action))
        throw std::invalid_argument("spatial_code: unknown action '" + action + "'");
    if (action == "Sitting") return std::nullopt;

    // transition is corridor movement, coded as secondary-tier Other
    const std::string prefix = zone == Zone::primary ? "prim" : "sec";
    const std::string candidate =
        zone == Zone::transition ? spatial_code_name("sec", "Other") : spatial_code_name(prefix, action);

    if (std::find(code_set.begin(), code_set.end(), candidate) != code_set.end()) return candidate;
    const std::string fallback = spatial_code_name(prefix, "Other");
    if (std::find(code_set.begin(), code_set.end(), fallback) != code_set.end()) return fallback;
    throw std::invalid_argument("spatial_code: code set lacks '" + fallback + "'");
}

std::vector<double> TimelineMatrix::activation_fractions() const {
    std::vector<double> out(codes.size(), 0.0);
    const std::size_t r = rows();
    if (r == 0) return out;
    for (std::size_t row = 0; row < r; ++row)
        for (std::size_t col = 0; col < codes.size(); ++col) out[col] += at(row, col);
    for (double& v : out) v /= static_cast<double>(r);
    return out;
}

TimelineMatrix build_timeline(const std::vector<FrameRecord>& frames, TimelineMode mode,
                              const ActionTaxonomy& taxonomy, const SpaceMap& map) {
    if (frames.empty()) throw std::invalid_argument("build_timeline: empty frame list");

    TimelineMatrix tl;
    tl.unit_id = frames.front().session_id;
    for (const auto& f : frames)
        if (f.session_id != tl.unit_id)
            throw std::invalid_argument("build_timeline: frames span multiple sessions");

    if (mode == TimelineMode::plain) {
        for (const auto& code : taxonomy.codes())
            if (code != "Sitting") tl.codes.push_back(code);
    } else {
        tl.codes = default_spatial_codes(taxonomy);
    }

    double tmin = frames.front().t, tmax = frames.front().t;
    for (const auto& f : frames) {
        tmin = std::min(tmin, f.t);
        tmax = std::max(tmax, f.t);
    }
    tl.t0 = static_cast<long>(std::floor(tmin));
    tl.t1 = static_cast<long>(std::floor(tmax)) + 1;
    tl.cells.assign(tl.rows() * tl.codes.size(), 0);

    const auto col_of = [&](const std::string& code) {
        const auto it = std::find(tl.codes.begin(), tl.codes.end(), code);
        return it == tl.codes.end() ? tl.codes.size() : static_cast<std::size_t>(it - tl.codes.begin());
    };

    for (const auto& f : frames) {
        const std::size_t row = static_cast<std::size_t>(static_cast<long>(std::floor(f.t)) - tl.t0);
        for (const auto& d : f.detections) {
            if (!taxonomy.contains(d.label))
                throw std::invalid_argument("build_timeline: unknown taxonomy code '" + d.label + "'");
            if (d.label == "Sitting") continue;
            std::size_t col;
            if (mode == TimelineMode::plain) {
                col = col_of(d.label);
            } else {
                const Zone zone = assign_space(d.box, map).zone;
                const auto code = spatial_code(d.label, zone, taxonomy, tl.codes);
                if (!code) continue;
                col = col_of(*code);
            }
            if (col < tl.codes.size()) tl.set(row, col, 1);
        }
    }
    return tl;
}

void write_timeline_csv(std::ostream& out, const TimelineMatrix& tl) {
    out << "second";
    for (const auto& c : tl.codes) out << "," << c;
    out << "\n";
    for (std::size_t row = 0; row < tl.rows(); ++row) {
        out << (tl.t0 + static_cast<long>(row));
        for (std::size_t col = 0; col < tl.codes.size(); ++col)
            out << "," << static_cast<int>(tl.at(row, col));
        out << "\n";
    }
}

TimelineMatrix read_timeline_csv(std::istream& in, const std::string& unit_id) {
    TimelineMatrix tl;
    tl.unit_id = unit_id;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("timeline csv: empty file");
    {
        std::stringstream header(line);
        std::string field;
        bool first = true;
        while (std::getline(header, field, ',')) {
            if (first) {
                if (field != "second") throw std::invalid_argument("timeline csv: first column must be 'second'");
                first = false;
            } else {
                tl.codes.push_back(field);
            }
        }
    }
    std::vector<std::vector<std::uint8_t>> rows;
    bool have_t0 = false;
    long expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',')) throw std::invalid_argument("timeline csv: bad row");
        const long second = std::stol(field);
        if (!have_t0) {
            tl.t0 = second;
            expected = second;
            have_t0 = true;
        }
        if (second != expected)
            throw std::invalid_argument("timeline csv: seconds must be contiguous");
        ++expected;
        std::vector<std::uint8_t> row;
        while (std::getline(ss, field, ','))
            row.push_back(field == "1" ? std::uint8_t{1} : std::uint8_t{0});
        if (row.size() != tl.codes.size())
            throw std::invalid_argument("timeline csv: row width mismatch");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("timeline csv: no data rows");
    tl.t1 = tl.t0 + static_cast<long>(rows.size());
    tl.cells.reserve(rows.size() * tl.codes.size());
    for (const auto& r : rows) tl.cells.insert(tl.cells.end(), r.begin(), r.end());
    return tl;
}

TimelineMatrix load_timeline_csv(const std::string& path, const std::string& unit_id) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open timeline csv: " + path);
    return read_timeline_csv(in, unit_id);
}

}  // namespace coact::spatial
