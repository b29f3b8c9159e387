#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "coact/spatial.hpp"
#include "coact/stats.hpp"
#include "coact/types.hpp"

namespace coact::ena {

// Canonical (i<j) pair order over k codes: (0,1), (0,2), ..., (k-2,k-1).
std::vector<std::pair<std::size_t, std::size_t>> pair_order(std::size_t code_count);

struct ConnectionVector {
    std::string unit_id;
    std::vector<std::string> codes;
    std::vector<double> values;  // length k*(k-1)/2, canonical pair order
    bool normalized = false;
    bool zero_flagged = false;  // normalization hit an all-zero vector
};

// Moving-stanza accumulation with trailing window. For second t the stanza
// is rows max(0, t-window+1)..t; pair (i,j) scores 1 at t when the current
// row carries one code and any stanza row carries the other.
ConnectionVector accumulate_connections(const spatial::TimelineMatrix& timeline,
                                        std::size_t window = 6);

ConnectionVector sphere_normalize(const ConnectionVector& v);

struct EnaSpace {
    std::vector<std::string> unit_ids;
    std::vector<Level> labels;
    std::vector<double> center;                   // grand mean
    std::vector<std::vector<double>> axes;        // axis 0 = means rotation; orthonormal
    std::vector<double> singular_values;          // residual axes only
    std::vector<std::vector<double>> points;      // per unit, length = axes.size()
};

// Means rotation: axis 1 along mean(High) - mean(Low) of the centered data,
// residual axes from the SVD of the deflated matrix. High group mean
// projects positive on axis 1.
EnaSpace means_rotation(const std::vector<ConnectionVector>& vectors,
                        const std::vector<Level>& labels, std::size_t residual_dims = 1);

enum class GraphKind { group_mean, difference };

struct NetworkGraph {
    std::vector<std::string> nodes;
    std::vector<std::pair<double, double>> layout;  // fixed circle, node order
    std::vector<double> edge_weights;               // canonical pair order
    GraphKind kind = GraphKind::group_mean;
};

struct GroupNetworks {
    NetworkGraph high;
    NetworkGraph low;
    NetworkGraph difference;  // high - low, edgewise
};

GroupNetworks group_networks(const std::vector<ConnectionVector>& vectors,
                             const std::vector<Level>& labels);

struct ProjectionComparison {
    stats::MannWhitneyResult mw;  // group 1 = High
    double median_high = 0.0;
    double median_low = 0.0;
    std::size_t n_high = 0;
    std::size_t n_low = 0;
    std::size_t dim = 1;
};

// Mann-Whitney on the given axis coordinate (1-based), High as group 1.
ProjectionComparison compare_projection(const EnaSpace& space, std::size_t dim = 1);

}  // namespace coact::ena
