#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coact/types.hpp"

namespace coact {

// Timestamps handover_s, handover_s + interval, ... strictly below duration_s.
// The pre-handover interval is excluded.
std::vector<double> plan_frame_samples(const Session& session, double interval_s = 10.0);

struct SplitResult {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
    std::vector<std::string> warnings;
};

// Per-class largest-remainder rounding of the ratios; the class members are
// shuffled with the seed before assignment so the partition is deterministic.
SplitResult stratified_split(const std::vector<std::pair<std::string, std::string>>& instances,
                             const std::array<double, 3>& ratios = {0.70, 0.20, 0.10},
                             std::uint64_t seed = 0);

struct ImbalanceResult {
    double ratio = 1.0;
    bool flag = false;  // strictly exceeds the limit
};

ImbalanceResult imbalance_ratio(const std::map<std::string, std::size_t>& class_counts,
                                double limit = 5.0);

std::vector<std::vector<std::string>> kfold_splits(const std::vector<std::string>& ids,
                                                   std::size_t k = 5, std::uint64_t seed = 0);

// task = mean of T1..T3, collaboration = mean of T4..T6. Means >= 3.5 are
// High; means inside the open (3,4) gap carry the boundary flag.
PerformanceGroup performance_group(const RubricAssessment& assessment, Dimension dimension);

}  // namespace coact
