#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coact/types.hpp"

namespace coact {

// Newline-delimited JSON records:
//   {"session_id":"s01","t":12,"source":"model",
//    "detections":[{"label":"Using Phone","confidence":0.9,"box":[x1,y1,x2,y2]}]}
// Every record is validated against the type invariants and the taxonomy;
// errors carry the 1-based line number.
std::vector<FrameRecord> parse_detection_log(std::istream& in, const ActionTaxonomy& taxonomy);
std::vector<FrameRecord> load_detection_log(const std::string& path, const ActionTaxonomy& taxonomy);

void write_detection_log(std::ostream& out, const std::vector<FrameRecord>& frames);

StudyConfig load_study_config(const std::string& path);
StudyConfig parse_study_config(const std::string& text);

}  // namespace coact
