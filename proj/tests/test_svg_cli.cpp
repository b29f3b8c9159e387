#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coact/cli.hpp"
#include "coact/ena.hpp"
#include "coact/svg.hpp"

using namespace coact;
namespace fs = std::filesystem;

#ifndef COACT_DATA_DIR
#define COACT_DATA_DIR "data"
#endif

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "coact_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> extract_attr(const std::string& svg, const std::string& attr) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    const std::string needle = attr + "=\"";
    while ((pos = svg.find(needle, pos)) != std::string::npos) {
        pos += needle.size();
        const std::size_t end = svg.find('"', pos);
        out.push_back(svg.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

}  // namespace

TEST_CASE("diverging palette: endpoints and exact center") {
    CHECK(svg::diverging_color(0.0) == "#f7f7f7");
    CHECK(svg::diverging_color(1.0) == "#b2182b");
    CHECK(svg::diverging_color(-1.0) == "#2166ac");
    CHECK(svg::diverging_color(2.0) == "#b2182b");  // clamped
}

TEST_CASE("heatmap triptych: zero difference is uniformly mid-palette") {
    Matrix high(5, 2, 0.4), low(5, 2, 0.4), diff(5, 2, 0.0);
    high(2, 1) = 1.0;
    low(2, 1) = 1.0;
    const std::string out = svg::heatmap_triptych(high, low, diff, {"a", "b"});
    CHECK(out.find("<svg") == 0);
    CHECK(out.rfind("</svg>\n") == out.size() - 7);

    // the final panel's cells (last rows*cols rects) are all the center color
    const auto fills = extract_attr(out, "fill");
    std::vector<std::string> cell_fills;
    for (const auto& f : fills)
        if (f[0] == '#' && f != "#ffffff") cell_fills.push_back(f);
    REQUIRE(cell_fills.size() >= 30);
    for (std::size_t i = cell_fills.size() - 10; i < cell_fills.size(); ++i)
        CHECK(cell_fills[i] == "#f7f7f7");
}

TEST_CASE("heatmap triptych: one-cell panels are valid svg; sign flip mirrors colors") {
    Matrix one(1, 1, 0.3);
    const std::string tiny = svg::heatmap_triptych(one, one, one, {"only"});
    CHECK(tiny.find("<svg") == 0);
    CHECK(tiny.find("</svg>") != std::string::npos);

    Matrix diff(1, 2, 0.0);
    diff(0, 0) = 0.8;
    diff(0, 1) = -0.8;
    Matrix zero(1, 2, 0.0);
    const std::string fwd = svg::heatmap_triptych(zero, zero, diff, {"a", "b"});
    Matrix flipped = diff;
    for (double& v : flipped.data) v = -v;
    const std::string rev = svg::heatmap_triptych(zero, zero, flipped, {"a", "b"});

    const auto fills_fwd = extract_attr(fwd, "fill");
    const auto fills_rev = extract_attr(rev, "fill");
    REQUIRE(fills_fwd.size() == fills_rev.size());
    // difference-panel cells are the last two cell rects; they swap colors
    const std::string f1 = fills_fwd[fills_fwd.size() - 2], f2 = fills_fwd.back();
    const std::string r1 = fills_rev[fills_rev.size() - 2], r2 = fills_rev.back();
    CHECK(f1 == r2);
    CHECK(f2 == r1);
    CHECK(f1 != f2);
}

TEST_CASE("network svg: stroke widths proportional to |weight|") {
    ena::ConnectionVector v1, v2;
    v1.unit_id = "h";
    v2.unit_id = "l";
    v1.codes = v2.codes = {"a", "b", "c"};
    v1.values = {0.4, 0.8, 0.0};  // edges (a,b), (a,c), (b,c)
    v2.values = {0.0, 0.0, 0.0};
    const auto nets = ena::group_networks({v1, v2}, {Level::High, Level::Low});
    const std::string out = svg::network_panels(nets);

    const auto widths = extract_attr(out, "stroke-width");
    std::vector<double> w;
    for (const auto& s : widths) w.push_back(std::stod(s));
    // High panel draws two edges with ratio 1:2; difference repeats them
    REQUIRE(w.size() == 4);
    CHECK(w[1] / w[0] == doctest::Approx(2.0).epsilon(1e-6));

    // all-zero edges: nodes only
    ena::ConnectionVector z = v2;
    z.unit_id = "z";
    const auto zero_nets = ena::group_networks({z, v2}, {Level::High, Level::Low});
    const std::string empty = svg::network_panels(zero_nets);
    CHECK(extract_attr(empty, "stroke-width").empty());
    CHECK(empty.find("<circle") != std::string::npos);

    // negating the difference swaps edge colors, keeps geometry
    ena::GroupNetworks swapped = nets;
    for (double& e : swapped.difference.edge_weights) e = -e;
    const std::string pos_svg = svg::network_panels(nets);
    const std::string neg_svg = svg::network_panels(swapped);
    CHECK(extract_attr(pos_svg, "x1") == extract_attr(neg_svg, "x1"));
    const auto strokes_pos = extract_attr(pos_svg, "stroke");
    const auto strokes_neg = extract_attr(neg_svg, "stroke");
    REQUIRE(strokes_pos.size() == strokes_neg.size());
    bool saw_swap = false;
    for (std::size_t i = 0; i < strokes_pos.size(); ++i) {
        if (strokes_pos[i] == "#b2182b" && strokes_neg[i] == "#2166ac") saw_swap = true;
    }
    CHECK(saw_swap);
}

TEST_CASE("cli: usage errors and missing files") {
    CHECK(cli::dispatch({}) == 2);
    CHECK(cli::dispatch({"frobnicate"}) == 2);
    CHECK(cli::dispatch({"irr"}) == 2);  // missing required options
    const auto dir = fresh_dir("missing");
    CHECK(cli::dispatch({"irr", "--a", (dir / "nope.jsonl").string(), "--b",
                         (dir / "nope2.jsonl").string()}) == 1);
}

TEST_CASE("cli: irr on the bundled fixture reproduces the Overall row") {
    const auto dir = fresh_dir("irr_cli");
    const std::string out = (dir / "irr.csv").string();
    const int code = cli::dispatch({"irr", "--a", std::string(COACT_DATA_DIR) + "/irr_rater_a.jsonl",
                                    "--b", std::string(COACT_DATA_DIR) + "/irr_rater_b.jsonl",
                                    "--out", out});
    REQUIRE(code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.find("Overall,399,31,26,0.928,0.939,0.933") != std::string::npos);
    CHECK(fs::exists(out));
    CHECK(!fs::exists(out + ".tmp"));
}

TEST_CASE("cli: timeline -> single csv for a one-session log") {
    const auto dir = fresh_dir("tl_cli");
    const fs::path log = dir / "one.jsonl";
    {
        std::ofstream f(log);
        f << R"({"session_id":"solo","t":1.0,"source":"m","detections":[{"label":"Other","box":[10,10,20,20]}]})"
          << "\n";
        f << R"({"session_id":"solo","t":2.5,"source":"m","detections":[{"label":"Using Phone","box":[10,10,20,20]}]})"
          << "\n";
    }
    const fs::path out = dir / "solo.csv";
    const int code = cli::dispatch({"timeline", "--log", log.string(), "--config",
                                    std::string(COACT_DATA_DIR) + "/study_config.json", "--mode",
                                    "plain", "--out", out.string()});
    REQUIRE(code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.rfind("second,", 0) == 0);
    CHECK(csv.find("\n1,") != std::string::npos);
}

TEST_CASE("cli: split and mask run on bundled data") {
    const auto dir = fresh_dir("misc_cli");
    CHECK(cli::dispatch({"split", "--instances", std::string(COACT_DATA_DIR) + "/instances.csv",
                         "--seed", "3", "--out", (dir / "splits.csv").string()}) == 0);
    const std::string splits = slurp(dir / "splits.csv");
    CHECK(splits.find("imbalance_ratio") != std::string::npos);
    CHECK(splits.find("7.500") != std::string::npos);  // 30 Other vs 4 Using Phone

    CHECK(cli::dispatch({"mask", "--log", std::string(COACT_DATA_DIR) + "/irr_rater_a.jsonl",
                         "--out", (dir / "masks.csv").string()}) == 0);
    const std::string masks = slurp(dir / "masks.csv");
    // fixture boxes are (x, 40)-(x+60, 140): mask bottom = 40 + 0.2*100 = 60
    CHECK(masks.find(",40.00,") != std::string::npos);
    CHECK(masks.find(",60.00\n") != std::string::npos);

    CHECK(cli::dispatch({"sample-frames", "--config",
                         std::string(COACT_DATA_DIR) + "/study_config.json", "--out",
                         (dir / "samples.csv").string()}) == 0);
    const std::string samples = slurp(dir / "samples.csv");
    CHECK(samples.find("s01,30.000") != std::string::npos);  // handover of s01
}

TEST_CASE("atomic_write replaces content and leaves no temp file") {
    const auto dir = fresh_dir("atomic");
    const fs::path p = dir / "x.txt";
    cli::atomic_write(p.string(), "one");
    cli::atomic_write(p.string(), "two");
    CHECK(slurp(p) == "two");
    CHECK(!fs::exists(p.string() + ".tmp"));
}
