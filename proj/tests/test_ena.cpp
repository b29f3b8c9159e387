#include <doctest.h>

#include <cmath>

#include "coact/ena.hpp"
#include "coact/rng.hpp"
#include "oracles.hpp"

using namespace coact;
using namespace coact::ena;

namespace {

spatial::TimelineMatrix timeline_from_rows(const std::vector<std::vector<int>>& rows,
                                           const std::string& unit = "u") {
    spatial::TimelineMatrix tl;
    tl.unit_id = unit;
    tl.t0 = 0;
    tl.t1 = static_cast<long>(rows.size());
    const std::size_t k = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < k; ++c) tl.codes.push_back("c" + std::to_string(c));
    for (const auto& row : rows)
        for (int v : row) tl.cells.push_back(static_cast<std::uint8_t>(v));
    return tl;
}

ConnectionVector vec_of(const std::string& unit, std::vector<double> values) {
    ConnectionVector v;
    v.unit_id = unit;
    v.values = std::move(values);
    v.normalized = true;
    return v;
}

}  // namespace

TEST_CASE("accumulate_connections: spec examples") {
    // one code ever active -> zero vector
    const auto solo = accumulate_connections(timeline_from_rows({{1, 0}, {1, 0}, {1, 0}}), 6);
    CHECK(solo.values == std::vector<double>{0.0});

    // t0={A}, t1={B} with window 6: connection counted at t1
    const auto seq = accumulate_connections(timeline_from_rows({{1, 0}, {0, 1}}), 6);
    CHECK(seq.values == std::vector<double>{1.0});

    // within-row co-occurrence at t0 alone
    const auto both = accumulate_connections(timeline_from_rows({{1, 1}}), 6);
    CHECK(both.values == std::vector<double>{1.0});

    CHECK_THROWS(accumulate_connections(timeline_from_rows({}), 6));
    CHECK_THROWS(accumulate_connections(timeline_from_rows({{1, 0}}), 0));
}

TEST_CASE("accumulate_connections: window 1 reduces to within-row counting") {
    Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t t = 1 + rng.index(8), k = 2 + rng.index(3);
        std::vector<std::vector<int>> rows(t, std::vector<int>(k, 0));
        for (auto& row : rows)
            for (int& v : row) v = rng.uniform() < 0.4 ? 1 : 0;
        const auto got = accumulate_connections(timeline_from_rows(rows), 1);
        const auto pairs = pair_order(k);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            double expect = 0.0;
            for (const auto& row : rows)
                if (row[pairs[p].first] && row[pairs[p].second]) expect += 1.0;
            CHECK(got.values[p] == doctest::Approx(expect));
        }
    }
}

TEST_CASE("accumulate_connections equals the stanza enumerator on random timelines") {
    Rng rng(62);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t t = 1 + rng.index(10), k = 2 + rng.index(3);
        const std::size_t window = 1 + rng.index(7);
        std::vector<std::vector<int>> rows(t, std::vector<int>(k, 0));
        for (auto& row : rows)
            for (int& v : row) v = rng.uniform() < 0.35 ? 1 : 0;
        const auto got = accumulate_connections(timeline_from_rows(rows), window);
        CHECK(got.values == oracles::stanza_brute(rows, window));
    }
}

TEST_CASE("sphere_normalize") {
    const auto v = sphere_normalize(vec_of("u", {3, 4}));
    CHECK(v.values[0] == doctest::Approx(0.6));
    CHECK(v.values[1] == doctest::Approx(0.8));
    CHECK(!v.zero_flagged);

    const auto z = sphere_normalize(vec_of("u", {0, 0, 0}));
    CHECK(z.zero_flagged);
    CHECK(z.values == std::vector<double>{0, 0, 0});

    const auto unit = sphere_normalize(vec_of("u", {0.6, 0.8}));
    CHECK(unit.values[0] == doctest::Approx(0.6));
    CHECK(unit.values[1] == doctest::Approx(0.8));
}

TEST_CASE("means_rotation: two-point geometry") {
    const std::vector<ConnectionVector> vecs = {vec_of("h", {1, 0, 0}), vec_of("l", {0, 1, 0})};
    const std::vector<Level> labels = {Level::High, Level::Low};
    const auto space = means_rotation(vecs, labels, 1);
    const double d = std::sqrt(2.0);
    CHECK(space.points[0][0] == doctest::Approx(d / 2));
    CHECK(space.points[1][0] == doctest::Approx(-d / 2));
    CHECK(space.points[0][1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(space.points[1][1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(space.singular_values[0] == doctest::Approx(0.0));
}

TEST_CASE("means_rotation: symmetric groups align axis 1 with the separating coordinate") {
    // groups symmetric about the center along coordinate 0
    const std::vector<ConnectionVector> vecs = {
        vec_of("h1", {2.0, 0.3, 0.1}), vec_of("h2", {2.0, -0.3, -0.1}),
        vec_of("l1", {-2.0, 0.3, 0.1}), vec_of("l2", {-2.0, -0.3, -0.1})};
    const std::vector<Level> labels = {Level::High, Level::High, Level::Low, Level::Low};
    const auto space = means_rotation(vecs, labels, 2);
    CHECK(std::fabs(space.axes[0][0]) == doctest::Approx(1.0));
    CHECK(space.axes[0][1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(space.axes[0][2] == doctest::Approx(0.0).epsilon(1e-12));
    // High mean projects positive
    CHECK(space.points[0][0] > 0.0);
}

TEST_CASE("means_rotation: group means differ only on axis 1; axes orthonormal") {
    Rng rng(83);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t p = 4 + rng.index(5);
        std::vector<ConnectionVector> vecs;
        std::vector<Level> labels;
        for (int i = 0; i < 8; ++i) {
            std::vector<double> v(p);
            for (double& x : v) x = rng.uniform();
            // shift the first half so the rotation is not degenerate
            if (i < 4) v[0] += 1.0;
            vecs.push_back(vec_of("u" + std::to_string(i), v));
            labels.push_back(i < 4 ? Level::High : Level::Low);
        }
        const std::size_t residual = 2;
        const auto space = means_rotation(vecs, labels, residual);

        for (std::size_t a = 0; a < space.axes.size(); ++a)
            for (std::size_t b = 0; b < space.axes.size(); ++b) {
                const double expect = a == b ? 1.0 : 0.0;
                CHECK(dot(space.axes[a], space.axes[b]) == doctest::Approx(expect).epsilon(1e-9));
            }

        for (std::size_t d = 1; d < 1 + residual; ++d) {
            double mh = 0.0, ml = 0.0;
            for (std::size_t i = 0; i < 8; ++i)
                (labels[i] == Level::High ? mh : ml) += space.points[i][d];
            CHECK(std::fabs(mh / 4 - ml / 4) < 1e-9);
        }
        // and on axis 1 they differ (positive direction = High)
        double mh0 = 0.0, ml0 = 0.0;
        for (std::size_t i = 0; i < 8; ++i)
            (labels[i] == Level::High ? mh0 : ml0) += space.points[i][0];
        CHECK(mh0 / 4 > ml0 / 4);
    }
}

TEST_CASE("means_rotation: permuting unit order only reorders points") {
    Rng rng(84);
    std::vector<ConnectionVector> vecs;
    std::vector<Level> labels;
    for (int i = 0; i < 6; ++i) {
        std::vector<double> v(5);
        for (double& x : v) x = rng.uniform();
        if (i < 3) v[1] += 0.8;
        vecs.push_back(vec_of("u" + std::to_string(i), v));
        labels.push_back(i < 3 ? Level::High : Level::Low);
    }
    const auto base = means_rotation(vecs, labels, 1);

    std::vector<std::size_t> perm = {3, 0, 5, 2, 4, 1};
    std::vector<ConnectionVector> pv;
    std::vector<Level> pl;
    for (std::size_t i : perm) {
        pv.push_back(vecs[i]);
        pl.push_back(labels[i]);
    }
    const auto permuted = means_rotation(pv, pl, 1);
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t d = 0; d < base.points[0].size(); ++d)
            CHECK(permuted.points[i][d] == doctest::Approx(base.points[perm[i]][d]).epsilon(1e-9));

    CHECK_THROWS_WITH_AS(means_rotation({vec_of("a", {1, 0}), vec_of("b", {1, 0})},
                                        {Level::High, Level::Low}, 1),
                         doctest::Contains("degenerate"), std::invalid_argument);
}

TEST_CASE("group_networks: means, difference, antisymmetry") {
    std::vector<ConnectionVector> vecs = {vec_of("h1", {1, 0, 1}), vec_of("h2", {0, 1, 1}),
                                          vec_of("l1", {1, 1, 0}), vec_of("l2", {0, 0, 1})};
    for (auto& v : vecs) v.codes = {"a", "b", "c"};
    const std::vector<Level> labels = {Level::High, Level::High, Level::Low, Level::Low};
    const auto nets = group_networks(vecs, labels);
    CHECK(nets.high.edge_weights == std::vector<double>{0.5, 0.5, 1.0});
    CHECK(nets.low.edge_weights == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(nets.difference.edge_weights == std::vector<double>{0.0, 0.0, 0.5});

    // swapping labels negates the difference edges
    const std::vector<Level> swapped = {Level::Low, Level::Low, Level::High, Level::High};
    const auto rev = group_networks(vecs, swapped);
    for (std::size_t p = 0; p < 3; ++p)
        CHECK(rev.difference.edge_weights[p] == doctest::Approx(-nets.difference.edge_weights[p]));

    // identical groups -> zero difference
    const auto zero = group_networks({vecs[0], vecs[0]}, {Level::High, Level::Low});
    for (double w : zero.difference.edge_weights) CHECK(w == doctest::Approx(0.0));

    // single unit per group -> graphs equal those vectors
    const auto single = group_networks({vecs[0], vecs[2]}, {Level::High, Level::Low});
    CHECK(single.high.edge_weights == vecs[0].values);
    CHECK(single.low.edge_weights == vecs[2].values);
}

TEST_CASE("compare_projection") {
    // all High above all Low on dim 1 -> |r| = 1
    std::vector<ConnectionVector> vecs;
    std::vector<Level> labels;
    for (int i = 0; i < 8; ++i) {
        std::vector<double> v(6, 0.0);
        v[0] = i < 4 ? 2.0 + 0.1 * i : -2.0 - 0.1 * i;
        v[1 + static_cast<std::size_t>(i % 3)] = 0.5;
        vecs.push_back(vec_of("u" + std::to_string(i), v));
        labels.push_back(i < 4 ? Level::High : Level::Low);
    }
    const auto space = means_rotation(vecs, labels, 1);
    const auto cmp = compare_projection(space, 1);
    CHECK(std::fabs(cmp.mw.r) == doctest::Approx(1.0));
    CHECK(cmp.median_high > cmp.median_low);
    CHECK(cmp.n_high == 4);
    CHECK(cmp.n_low == 4);

    CHECK_THROWS(compare_projection(space, 0));
    CHECK_THROWS(compare_projection(space, 99));

    // formula-level check of the reported tuple
    CHECK(stats::rank_biserial(106, 40, 11) == doctest::Approx(0.518).epsilon(0.002));
}
