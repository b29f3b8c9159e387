#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coact/types.hpp"

namespace coact::spatial {

// Nearest centroid to the box midpoint; ties broken by map order.
const SpaceCentroid& assign_space(const BoundingBox& box, const SpaceMap& map);

// The 11 default socio-spatial codes: prim_ for all six non-Sitting actions,
// sec_ without Using Phone. Built from the taxonomy so a custom taxonomy
// yields the parallel set.
std::vector<std::string> default_spatial_codes(const ActionTaxonomy& taxonomy);

std::string spatial_code_name(const std::string& prefix, const std::string& action);

// Sitting is filtered. Primary-zone actions take prim_, secondary and
// distraction zones take sec_, transition maps to the secondary Other code.
// Combinations outside the configured code set collapse to the zone's Other.
// nullopt = filtered.
std::optional<std::string> spatial_code(const std::string& action, Zone zone,
                                        const ActionTaxonomy& taxonomy,
                                        const std::vector<std::string>& code_set);

enum class TimelineMode { plain, spatial };

struct TimelineMatrix {
    std::string unit_id;
    long t0 = 0;  // inclusive second
    long t1 = 0;  // exclusive second; rows = t1 - t0
    std::vector<std::string> codes;
    std::vector<std::uint8_t> cells;  // row-major seconds x codes, values 0/1

    std::size_t rows() const { return static_cast<std::size_t>(t1 - t0); }
    std::uint8_t at(std::size_t row, std::size_t col) const { return cells[row * codes.size() + col]; }
    void set(std::size_t row, std::size_t col, std::uint8_t v) { cells[row * codes.size() + col] = v; }

    // fraction of seconds each code is active
    std::vector<double> activation_fractions() const;
};

// One session's frames -> per-second binary code matrix. A code is on in
// second s when any detection in any frame with floor(t) == s carries it;
// frameless seconds stay all-zero. Range [floor(min t), floor(max t)].
TimelineMatrix build_timeline(const std::vector<FrameRecord>& frames, TimelineMode mode,
                              const ActionTaxonomy& taxonomy, const SpaceMap& map);

void write_timeline_csv(std::ostream& out, const TimelineMatrix& tl);
TimelineMatrix read_timeline_csv(std::istream& in, const std::string& unit_id);
TimelineMatrix load_timeline_csv(const std::string& path, const std::string& unit_id);

}  // namespace coact::spatial
