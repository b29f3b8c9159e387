#include "coact/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "coact/rng.hpp"

namespace coact {

std::vector<double> plan_frame_samples(const Session& session, double interval_s) {
    session.validate();
    if (!(interval_s > 0.0)) throw std::invalid_argument("plan_frame_samples: interval_s must be > 0");
    std::vector<double> out;
    // k-step arithmetic progression, not accumulation, so long sessions do not drift
    for (std::size_t k = 0;; ++k) {
        const double t = session.handover_s + static_cast<double>(k) * interval_s;
        if (t >= session.duration_s) break;
        out.push_back(t);
    }
    return out;
}

SplitResult stratified_split(const std::vector<std::pair<std::string, std::string>>& instances,
                             const std::array<double, 3>& ratios, std::uint64_t seed) {
    double sum = 0.0;
    for (double r : ratios) {
        if (r < 0.0) throw std::invalid_argument("stratified_split: ratios must be non-negative");
        sum += r;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("stratified_split: ratios must sum to 1");

    // classes in first-appearance order
    std::vector<std::string> classes;
    std::map<std::string, std::vector<std::string>> members;
    for (const auto& [id, cls] : instances) {
        if (members.find(cls) == members.end()) classes.push_back(cls);
        members[cls].push_back(id);
    }

    std::size_t nonzero_targets = 0;
    for (double r : ratios)
        if (r > 0.0) ++nonzero_targets;

    SplitResult out;
    std::array<std::vector<std::string>*, 3> splits = {&out.train, &out.validation, &out.test};
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        auto& ids = members[classes[ci]];
        Rng rng(derive_seed(seed, 0x73706c69ULL, ci));
        rng.shuffle(ids);

        const std::size_t n = ids.size();
        if (n < nonzero_targets)
            out.warnings.push_back("class '" + classes[ci] + "' has " + std::to_string(n) +
                                   " instance(s), fewer than the " + std::to_string(nonzero_targets) +
                                   " non-zero target splits; assigned to the largest split(s)");

        // largest-remainder rounding of n * ratio
        std::array<std::size_t, 3> counts{};
        std::array<double, 3> remainder{};
        std::size_t assigned = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            const double quota = static_cast<double>(n) * ratios[s];
            counts[s] = static_cast<std::size_t>(std::floor(quota + 1e-12));
            remainder[s] = quota - static_cast<double>(counts[s]);
            assigned += counts[s];
        }
        std::array<std::size_t, 3> order = {0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        for (std::size_t left = n - assigned, i = 0; left > 0; --left, ++i) ++counts[order[i % 3]];

        std::size_t pos = 0;
        for (std::size_t s = 0; s < 3; ++s)
            for (std::size_t i = 0; i < counts[s]; ++i) splits[s]->push_back(ids[pos++]);
    }
    return out;
}

ImbalanceResult imbalance_ratio(const std::map<std::string, std::size_t>& class_counts,
                                double limit) {
    if (class_counts.empty()) throw std::invalid_argument("imbalance_ratio: no classes");
    std::size_t lo = 0, hi = 0;
    for (const auto& [cls, count] : class_counts) {
        if (count == 0)
            throw std::invalid_argument("imbalance_ratio: class '" + cls + "' has zero count");
        if (lo == 0 || count < lo) lo = count;
        if (count > hi) hi = count;
    }
    ImbalanceResult res;
    res.ratio = static_cast<double>(hi) / static_cast<double>(lo);
    res.flag = res.ratio > limit;  // strict: "exceeded"
    return res;
}

std::vector<std::vector<std::string>> kfold_splits(const std::vector<std::string>& ids,
                                                   std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_splits: k must be >= 2");
    if (ids.size() < k) throw std::invalid_argument("kfold_splits: fewer ids than folds");
    std::vector<std::string> shuffled = ids;
    Rng rng(derive_seed(seed, 0x6b666f6cULL));
    rng.shuffle(shuffled);
    std::vector<std::vector<std::string>> folds(k);
    for (std::size_t i = 0; i < shuffled.size(); ++i) folds[i % k].push_back(shuffled[i]);
    return folds;
}

PerformanceGroup performance_group(const RubricAssessment& assessment, Dimension dimension) {
    assessment.validate();
    const std::size_t offset = dimension == Dimension::task ? 0 : 3;
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) sum += static_cast<double>(assessment.items[offset + i]);
    const double mean = sum / 3.0;

    PerformanceGroup g;
    g.dimension = dimension;
    g.mean_score = mean;
    g.level = mean >= 3.5 ? Level::High : Level::Low;
    g.boundary = mean > 3.0 && mean < 4.0;
    return g;
}

}  // namespace coact
