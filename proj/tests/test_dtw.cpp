#include <doctest.h>

#include <cmath>

#include "coact/dtw.hpp"
#include "coact/rng.hpp"
#include "oracles.hpp"

using namespace coact;
using namespace coact::dtw;

namespace {

ChannelSeries series1d(const std::string& unit, const std::vector<double>& values) {
    ChannelSeries s;
    s.unit_id = unit;
    s.channels = {"v"};
    s.values = Matrix(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) s.values(i, 0) = values[i];
    return s;
}

ChannelSeries random_series(Rng& rng, std::size_t t, std::size_t d, const std::string& unit) {
    ChannelSeries s;
    s.unit_id = unit;
    for (std::size_t c = 0; c < d; ++c) s.channels.push_back("c" + std::to_string(c));
    s.values = Matrix(t, d);
    for (double& v : s.values.data) v = rng.uniform() * 4.0 - 2.0;
    return s;
}

}  // namespace

TEST_CASE("fit_scaler / apply_scaler") {
    // constant channel: centered zeros, flagged
    const auto constant = series1d("a", {5, 5, 5});
    const auto sc = fit_scaler({constant});
    CHECK(sc.zero_sd[0]);
    const auto applied = apply_scaler(constant, sc);
    for (double v : applied.values.data) CHECK(v == doctest::Approx(0.0));

    // pooled over two sessions: mean 3, population sd sqrt(5)
    const auto s1 = series1d("a", {0, 2});
    const auto s2 = series1d("b", {4, 6});
    const auto pooled = fit_scaler({s1, s2});
    CHECK(pooled.means[0] == doctest::Approx(3.0));
    CHECK(pooled.sds[0] == doctest::Approx(std::sqrt(5.0)));

    // round trip within 1e-12
    Rng rng(3);
    const auto s = random_series(rng, 15, 3, "r");
    const auto scaler = fit_scaler({s});
    const auto back = invert_scaler(apply_scaler(s, scaler), scaler);
    for (std::size_t i = 0; i < s.values.data.size(); ++i)
        CHECK(back.values.data[i] == doctest::Approx(s.values.data[i]).epsilon(1e-12));
}

TEST_CASE("resample") {
    const auto same = resample(series1d("a", {1, 4, 2, 8}), 4);
    CHECK(same.values.data == std::vector<double>{1, 4, 2, 8});

    const auto mid = resample(series1d("a", {0, 1}), 3);
    CHECK(mid.values.data == std::vector<double>{0, 0.5, 1});

    const auto interp = resample(series1d("a", {0, 1, 4}), 5);
    CHECK(interp.values.data[0] == doctest::Approx(0.0));
    CHECK(interp.values.data[1] == doctest::Approx(0.5));
    CHECK(interp.values.data[2] == doctest::Approx(1.0));
    CHECK(interp.values.data[3] == doctest::Approx(2.5));
    CHECK(interp.values.data[4] == doctest::Approx(4.0));

    // endpoints exact on random input
    Rng rng(5);
    const auto s = random_series(rng, 9, 2, "r");
    const auto r = resample(s, 23);
    CHECK(r.values(0, 0) == s.values(0, 0));
    CHECK(r.values(22, 1) == s.values(8, 1));
    CHECK_THROWS(resample(s, 1));
}

TEST_CASE("dtw_distance: identity, two-point case, symmetry") {
    const auto a = series1d("a", {1, 2, 3, 2});
    const auto ident = dtw_distance(a, a, 100.0);
    CHECK(ident.cost == doctest::Approx(0.0));
    for (const auto& [i, j] : ident.path) CHECK(i == j);

    const auto two = dtw_distance(series1d("a", {0, 0}), series1d("b", {1, 1}), 100.0);
    CHECK(two.cost == doctest::Approx(2.0));

    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_series(rng, 2 + rng.index(5), 2, "x");
        const auto y = random_series(rng, 2 + rng.index(5), 2, "y");
        const double radius =
            std::max<double>(5.0, std::fabs(double(x.length()) - double(y.length())));
        CHECK(dtw_distance(x, y, radius).cost == doctest::Approx(dtw_distance(y, x, radius).cost));
    }

    CHECK_THROWS(dtw_distance(series1d("a", {1, 2, 3, 4, 5, 6, 7}), series1d("b", {1, 2}), 1.0));
}

TEST_CASE("dtw_distance equals brute-force path enumeration with bands") {
    Rng rng(11);
    int checked = 0;
    for (int trial = 0; trial < 250; ++trial) {
        const std::size_t la = 1 + rng.index(6), lb = 1 + rng.index(6);
        const std::size_t d = 1 + rng.index(2);
        const auto a = random_series(rng, la, d, "a");
        const auto b = random_series(rng, lb, d, "b");
        const double min_radius = std::fabs(double(la) - double(lb));
        for (const double radius : {min_radius, min_radius + 1.0, min_radius + 3.0, 100.0}) {
            const double got = dtw_distance(a, b, radius).cost;
            const double expect = oracles::dtw_brute(a.values, b.values, radius);
            CHECK(got == doctest::Approx(expect).epsilon(1e-9));
            ++checked;
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("dtw_distance: band monotonicity and positivity") {
    Rng rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        const auto a = random_series(rng, 2 + rng.index(5), 1 + rng.index(2), "a");
        const auto b = random_series(rng, a.length(), a.dims(), "b");
        double prev = std::numeric_limits<double>::infinity();
        for (const double radius : {0.0, 1.0, 2.0, 4.0, 100.0}) {
            const double cost = dtw_distance(a, b, radius).cost;
            CHECK(cost >= 0.0);
            CHECK(cost <= prev + 1e-12);
            prev = cost;
        }
        // equality only for identical series
        if (a.values.data != b.values.data) CHECK(prev > 0.0);
        CHECK(dtw_distance(a, a, 3.0).cost == doctest::Approx(0.0));
    }
}

TEST_CASE("dba_barycenter: fixed points and the two-series average") {
    const auto copy = series1d("a", {0.1, 0.7, 0.3});
    const auto proto = dba_barycenter({copy, copy, copy}, 2.0);
    CHECK(proto.iterations == 1);
    CHECK(proto.final_inertia == 0.0);
    CHECK(proto.values.data == copy.values.data);  // bit-exact

    const auto single = dba_barycenter({series1d("s", {2, 5, 1})}, 2.0);
    CHECK(single.values.data == std::vector<double>{2, 5, 1});

    const auto two = dba_barycenter({series1d("a", {0, 0, 0}), series1d("b", {2, 2, 2})}, 3.0);
    CHECK(two.values.data[0] == doctest::Approx(1.0));
    CHECK(two.values.data[1] == doctest::Approx(1.0));
    CHECK(two.values.data[2] == doctest::Approx(1.0));

    CHECK_THROWS(dba_barycenter({}, 1.0));
}

TEST_CASE("dba_barycenter: inertia non-increasing; order invariance") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<ChannelSeries> group;
        const std::size_t n = 2 + rng.index(4);
        const std::size_t t = 4 + rng.index(6);
        const std::size_t d = 1 + rng.index(2);
        for (std::size_t i = 0; i < n; ++i)
            group.push_back(random_series(rng, t, d, "u" + std::to_string(i)));
        const auto proto = dba_barycenter(group, 3.0, 20, 1e-9);
        for (std::size_t k = 1; k < proto.inertia_trace.size(); ++k)
            CHECK(proto.inertia_trace[k] <= proto.inertia_trace[k - 1] + 1e-12);

        std::vector<ChannelSeries> shuffled = group;
        rng.shuffle(shuffled);
        const auto proto2 = dba_barycenter(shuffled, 3.0, 20, 1e-9);
        CHECK(proto.values.data == proto2.values.data);  // unit_id ordering inside
    }
}

TEST_CASE("difference_map and effect_profile") {
    BarycenterPrototype h, l;
    h.channels = l.channels = {"x", "y"};
    h.values = Matrix(4, 2, 0.5);
    l.values = Matrix(4, 2, 0.5);
    const auto zero = difference_map(h, l);
    for (double v : zero.values.data) CHECK(v == doctest::Approx(0.0));
    for (double v : effect_profile(zero)) CHECK(v == doctest::Approx(0.0));

    // constant offset on channel 0
    for (std::size_t r = 0; r < 4; ++r) h.values(r, 0) = 1.2;
    const auto offset = difference_map(h, l);
    const auto prof = effect_profile(offset);
    CHECK(prof[0] == doctest::Approx(0.7));
    CHECK(prof[1] == doctest::Approx(0.0));

    // antisymmetry
    const auto neg = difference_map(l, h);
    for (std::size_t i = 0; i < offset.values.data.size(); ++i)
        CHECK(neg.values.data[i] == doctest::Approx(-offset.values.data[i]));

    // mean over the timeline: [-1, 1, 0, 0] -> 0
    BarycenterPrototype p0, z0;
    p0.channels = z0.channels = {"x"};
    p0.values = Matrix(4, 1, 0.0);
    p0.values(0, 0) = -1.0;
    p0.values(1, 0) = 1.0;
    z0.values = Matrix(4, 1, 0.0);
    CHECK(effect_profile(difference_map(p0, z0))[0] == doctest::Approx(0.0));

    BarycenterPrototype wrong;
    wrong.values = Matrix(3, 2, 0.0);
    CHECK_THROWS(difference_map(h, wrong));
}

TEST_CASE("stability_components: identity, sign flip with reversed ranks") {
    const std::vector<double> baseline = {0.8, -0.5, 0.3, -0.2};
    const auto perfect = stability_components(baseline, baseline, 0.1);
    CHECK(perfect.sign_agreement == doctest::Approx(1.0));
    CHECK(perfect.rho == doctest::Approx(1.0));
    CHECK(perfect.score == doctest::Approx(1.0));

    // flip every sign: ranks reverse exactly, agreement zero
    std::vector<double> flipped;
    for (double v : baseline) flipped.push_back(-v);
    const auto worst = stability_components(flipped, baseline, 0.1);
    CHECK(worst.sign_agreement == doctest::Approx(0.0));
    CHECK(worst.rho == doctest::Approx(-1.0));
    CHECK(worst.score == doctest::Approx(0.0));

    // weighting: only channels above the threshold count
    const std::vector<double> base2 = {0.9, 0.05, -0.05, 0.0};
    const std::vector<double> rep2 = {0.7, -0.05, 0.05, 0.1};
    CHECK(stability_components(rep2, base2, 0.1).sign_agreement == doctest::Approx(1.0));
}

TEST_CASE("select_length: single candidate, deterministic, 1-SE rule bound") {
    Rng rng(23);
    std::vector<ChannelSeries> sessions;
    std::vector<Level> labels;
    for (int i = 0; i < 8; ++i) {
        auto s = random_series(rng, 20 + rng.index(15), 3, "u" + std::to_string(i));
        if (i < 4)
            for (std::size_t r = 0; r < s.length(); ++r) s.values(r, 0) += 1.5;  // group contrast
        sessions.push_back(std::move(s));
        labels.push_back(i < 4 ? Level::High : Level::Low);
    }

    LengthSelectionParams params;
    params.bootstrap_replicates = 12;
    params.seed = 5;

    const auto lone = select_length(sessions, labels, {16}, params);
    CHECK(lone.chosen_length == 16);

    const auto rep = select_length(sessions, labels, {10, 16, 24}, params);
    const auto rep2 = select_length(sessions, labels, {10, 16, 24}, params);
    CHECK(rep.chosen_length == rep2.chosen_length);
    for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
        CHECK(rep.candidates[i].mean == rep2.candidates[i].mean);
        CHECK(rep.candidates[i].se == rep2.candidates[i].se);
    }
    CHECK(rep.chosen_length <= rep.best_length);

    // threaded run must match single-threaded bit for bit
    LengthSelectionParams threaded = params;
    threaded.threads = 4;
    const auto rep3 = select_length(sessions, labels, {10, 16, 24}, threaded);
    CHECK(rep3.chosen_length == rep.chosen_length);
    for (std::size_t i = 0; i < rep.candidates.size(); ++i)
        CHECK(rep3.candidates[i].mean == rep.candidates[i].mean);

    // all-flat sessions: every baseline effect below the sign threshold
    std::vector<ChannelSeries> flat;
    std::vector<Level> flat_labels;
    for (int i = 0; i < 4; ++i) {
        flat.push_back(series1d("f" + std::to_string(i), {0.0, 0.0, 0.0, 0.0, 0.0}));
        flat_labels.push_back(i < 2 ? Level::High : Level::Low);
    }
    CHECK_THROWS_WITH_AS(select_length(flat, flat_labels, {4}, params),
                         doctest::Contains("no stable channels"), std::invalid_argument);
}
