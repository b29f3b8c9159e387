#include "coact/ena.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coact/linalg.hpp"

namespace coact::ena {

std::vector<std::pair<std::size_t, std::size_t>> pair_order(std::size_t code_count) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < code_count; ++i)
        for (std::size_t j = i + 1; j < code_count; ++j) out.emplace_back(i, j);
    return out;
}

ConnectionVector accumulate_connections(const spatial::TimelineMatrix& timeline,
                                        std::size_t window) {
    if (window < 1) throw std::invalid_argument("accumulate_connections: window must be >= 1");
    const std::size_t rows = timeline.rows();
    if (rows == 0) throw std::invalid_argument("accumulate_connections: empty timeline");
    const std::size_t k = timeline.codes.size();

    ConnectionVector cv;
    cv.unit_id = timeline.unit_id;
    cv.codes = timeline.codes;
    const auto pairs = pair_order(k);
    cv.values.assign(pairs.size(), 0.0);

    std::vector<std::uint8_t> in_stanza(k, 0);
    for (std::size_t t = 0; t < rows; ++t) {
        const std::size_t start = t + 1 >= window ? t + 1 - window : 0;
        std::fill(in_stanza.begin(), in_stanza.end(), 0);
        for (std::size_t s = start; s <= t; ++s)
            for (std::size_t c = 0; c < k; ++c)
                if (timeline.at(s, c)) in_stanza[c] = 1;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto [i, j] = pairs[p];
            const bool hit = (timeline.at(t, i) && in_stanza[j]) || (timeline.at(t, j) && in_stanza[i]);
            if (hit) cv.values[p] += 1.0;
        }
    }
    return cv;
}

ConnectionVector sphere_normalize(const ConnectionVector& v) {
    ConnectionVector out = v;
    double len = 0.0;
    for (double x : v.values) len += x * x;
    len = std::sqrt(len);
    if (len <= 0.0) {
        out.normalized = true;
        out.zero_flagged = true;
        return out;
    }
    for (double& x : out.values) x /= len;
    out.normalized = true;
    return out;
}

namespace {

std::vector<double> group_mean(const std::vector<std::vector<double>>& rows,
                               const std::vector<Level>& labels, Level which) {
    std::vector<double> mean;
    std::size_t count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (labels[i] != which) continue;
        if (mean.empty()) mean.assign(rows[i].size(), 0.0);
        for (std::size_t d = 0; d < rows[i].size(); ++d) mean[d] += rows[i][d];
        ++count;
    }
    if (count == 0) throw std::invalid_argument("means_rotation: both groups must be non-empty");
    for (double& v : mean) v /= static_cast<double>(count);
    return mean;
}

}  // namespace

EnaSpace means_rotation(const std::vector<ConnectionVector>& vectors,
                        const std::vector<Level>& labels, std::size_t residual_dims) {
    if (vectors.size() != labels.size()) throw std::invalid_argument("means_rotation: size mismatch");
    if (vectors.size() < 2) throw std::invalid_argument("means_rotation: needs >= 2 units");
    if (residual_dims < 1) throw std::invalid_argument("means_rotation: residual_dims must be >= 1");

    const std::size_t p = vectors.front().values.size();
    std::vector<std::vector<double>> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.values.size() != p) throw std::invalid_argument("means_rotation: ragged vectors");
        rows.push_back(v.values);
    }

    EnaSpace space;
    for (const auto& v : vectors) space.unit_ids.push_back(v.unit_id);
    space.labels = labels;

    space.center.assign(p, 0.0);
    for (const auto& r : rows)
        for (std::size_t d = 0; d < p; ++d) space.center[d] += r[d];
    for (double& v : space.center) v /= static_cast<double>(rows.size());

    std::vector<std::vector<double>> centered = rows;
    for (auto& r : centered)
        for (std::size_t d = 0; d < p; ++d) r[d] -= space.center[d];

    std::vector<double> axis1 = group_mean(centered, labels, Level::High);
    const std::vector<double> mean_low = group_mean(centered, labels, Level::Low);
    for (std::size_t d = 0; d < p; ++d) axis1[d] -= mean_low[d];
    const double len = norm(axis1);
    if (len < 1e-12) throw std::invalid_argument("means_rotation: degenerate rotation (equal group means)");
    for (double& v : axis1) v /= len;
    space.axes.push_back(axis1);

    // deflate and take residual directions from the SVD
    Matrix resid(centered.size(), p);
    for (std::size_t i = 0; i < centered.size(); ++i) {
        const double proj = dot(centered[i], axis1);
        for (std::size_t d = 0; d < p; ++d) resid(i, d) = centered[i][d] - proj * axis1[d];
    }
    const SvdResult svd = svd_right(resid);
    const double sv_tol = 1e-9 * std::max(1.0, svd.singular_values.empty() ? 0.0 : svd.singular_values[0]);
    for (std::size_t r = 0; r < residual_dims; ++r) {
        if (r < svd.singular_values.size() && svd.singular_values[r] > sv_tol) {
            space.axes.push_back(svd.right_vectors[r]);
            space.singular_values.push_back(svd.singular_values[r]);
        } else {
            // rank exhausted: pad with an arbitrary orthonormal direction
            space.axes.push_back(orthonormal_complement_vector(space.axes, p));
            space.singular_values.push_back(0.0);
        }
    }

    for (const auto& r : centered) {
        std::vector<double> pt;
        pt.reserve(space.axes.size());
        for (const auto& ax : space.axes) pt.push_back(dot(r, ax));
        space.points.push_back(std::move(pt));
    }
    return space;
}

GroupNetworks group_networks(const std::vector<ConnectionVector>& vectors,
                             const std::vector<Level>& labels) {
    if (vectors.empty() || vectors.size() != labels.size())
        throw std::invalid_argument("group_networks: size mismatch or empty input");
    const auto& codes = vectors.front().codes;
    const std::size_t p = vectors.front().values.size();

    const auto make_graph = [&](GraphKind kind) {
        NetworkGraph g;
        g.nodes = codes;
        g.kind = kind;
        const std::size_t n = codes.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double angle = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n) - M_PI / 2.0;
            g.layout.emplace_back(std::cos(angle), std::sin(angle));
        }
        g.edge_weights.assign(p, 0.0);
        return g;
    };

    GroupNetworks out{make_graph(GraphKind::group_mean), make_graph(GraphKind::group_mean),
                      make_graph(GraphKind::difference)};

    std::size_t n_high = 0, n_low = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].values.size() != p) throw std::invalid_argument("group_networks: ragged vectors");
        auto& target = labels[i] == Level::High ? out.high : out.low;
        for (std::size_t d = 0; d < p; ++d) target.edge_weights[d] += vectors[i].values[d];
        (labels[i] == Level::High ? n_high : n_low) += 1;
    }
    if (n_high == 0 || n_low == 0)
        throw std::invalid_argument("group_networks: both groups must be non-empty");
    for (double& w : out.high.edge_weights) w /= static_cast<double>(n_high);
    for (double& w : out.low.edge_weights) w /= static_cast<double>(n_low);
    for (std::size_t d = 0; d < p; ++d)
        out.difference.edge_weights[d] = out.high.edge_weights[d] - out.low.edge_weights[d];
    return out;
}

ProjectionComparison compare_projection(const EnaSpace& space, std::size_t dim) {
    if (dim < 1 || dim > space.axes.size())
        throw std::invalid_argument("compare_projection: dim out of range");
    std::vector<double> high, low;
    for (std::size_t i = 0; i < space.points.size(); ++i) {
        (space.labels[i] == Level::High ? high : low).push_back(space.points[i][dim - 1]);
    }
    if (high.empty() || low.empty())
        throw std::invalid_argument("compare_projection: both groups must be non-empty");

    ProjectionComparison cmp;
    cmp.mw = stats::mann_whitney(high, low);
    cmp.median_high = cmp.mw.median_x;
    cmp.median_low = cmp.mw.median_y;
    cmp.n_high = high.size();
    cmp.n_low = low.size();
    cmp.dim = dim;
    return cmp;
}

}  // namespace coact::ena
