#include "coact/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace coact::svg {

namespace {

std::string num(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// ColorBrewer RdBu, 9 classes, blue to red
const int kRamp[9][3] = {
    {33, 102, 172}, {67, 147, 195}, {146, 197, 222}, {209, 229, 240}, {247, 247, 247},
    {253, 219, 199}, {244, 165, 130}, {214, 96, 77}, {178, 24, 43},
};

std::string rgb(int r, int g, int b) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string diverging_color(double t) {
    t = std::clamp(t, -1.0, 1.0);
    const double u = (t + 1.0) / 2.0 * 8.0;
    const int lo = std::clamp(static_cast<int>(std::floor(u)), 0, 8);
    const int hi = std::min(lo + 1, 8);
    const double f = u - lo;
    const auto mix = [&](int c) {
        return static_cast<int>(std::lround(kRamp[lo][c] * (1.0 - f) + kRamp[hi][c] * f));
    };
    return rgb(mix(0), mix(1), mix(2));
}

namespace {

double abs_max(const Matrix& m) {
    double v = 0.0;
    for (double x : m.data) v = std::max(v, std::fabs(x));
    return v;
}

void heatmap_panel(std::ostringstream& out, const Matrix& m, double vmax,
                   double x0, double y0, double cell_w, double cell_h,
                   const std::string& title) {
    out << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 - 8.0)
        << "\" font-size=\"13\" font-family=\"sans-serif\">" << escape(title) << "</text>\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double t = vmax > 0.0 ? m(r, c) / vmax : 0.0;
            out << "<rect x=\"" << num(x0 + static_cast<double>(c) * cell_w) << "\" y=\""
                << num(y0 + static_cast<double>(r) * cell_h) << "\" width=\"" << num(cell_w + 0.01)
                << "\" height=\"" << num(cell_h) << "\" fill=\"" << diverging_color(t) << "\"/>\n";
        }
    }
    // normalized-time axis 0..1
    const double w = static_cast<double>(m.cols) * cell_w;
    const double ybase = y0 + static_cast<double>(m.rows) * cell_h;
    out << "<text x=\"" << num(x0) << "\" y=\"" << num(ybase + 14.0)
        << "\" font-size=\"10\" font-family=\"sans-serif\">0</text>\n";
    out << "<text x=\"" << num(x0 + w - 6.0) << "\" y=\"" << num(ybase + 14.0)
        << "\" font-size=\"10\" font-family=\"sans-serif\">1</text>\n";
}

}  // namespace

std::string heatmap_triptych(const Matrix& high, const Matrix& low, const Matrix& diff,
                             const std::vector<std::string>& channels) {
    if (high.rows != low.rows || high.cols != low.cols || high.rows != diff.rows ||
        high.cols != diff.cols)
        throw std::invalid_argument("heatmap_triptych: shape mismatch");
    // panels are channels x time: transpose so rows are channels
    const std::size_t n_ch = high.cols;
    const std::size_t n_t = high.rows;

    const double label_w = 150.0;
    const double panel_w = 280.0;
    const double gap = 24.0;
    const double cell_w = panel_w / static_cast<double>(n_t);
    const double cell_h = 18.0;
    const double top = 30.0;
    const double width = label_w + 3.0 * panel_w + 2.0 * gap + 20.0;
    const double height = top + static_cast<double>(n_ch) * cell_h + 30.0;

    const auto transposed = [&](const Matrix& m) {
        Matrix t(m.cols, m.rows);
        for (std::size_t r = 0; r < m.rows; ++r)
            for (std::size_t c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
        return t;
    };
    const Matrix th = transposed(high);
    const Matrix tl = transposed(low);
    const Matrix td = transposed(diff);

    const double vmax_groups = std::max(abs_max(th), abs_max(tl));
    const double vmax_diff = abs_max(td);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" fill=\"white\"/>\n";

    for (std::size_t c = 0; c < n_ch; ++c) {
        out << "<text x=\"" << num(label_w - 6.0) << "\" y=\""
            << num(top + (static_cast<double>(c) + 0.7) * cell_h)
            << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">"
            << escape(channels.size() > c ? channels[c] : "ch" + std::to_string(c)) << "</text>\n";
    }

    heatmap_panel(out, th, vmax_groups, label_w, top, cell_w, cell_h, "High");
    heatmap_panel(out, tl, vmax_groups, label_w + panel_w + gap, top, cell_w, cell_h, "Low");
    heatmap_panel(out, td, vmax_diff, label_w + 2.0 * (panel_w + gap), top, cell_w, cell_h,
                  "Difference (High - Low)");

    out << "</svg>\n";
    return out.str();
}

namespace {

void network_panel(std::ostringstream& out, const ena::NetworkGraph& g, double wmax,
                   double cx, double cy, double radius, const std::string& title,
                   const std::string& solid_color) {
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(cy - radius - 28.0)
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">" << escape(title)
        << "</text>\n";
    const auto pos = [&](std::size_t i) {
        return std::pair<double, double>{cx + g.layout[i].first * radius,
                                         cy + g.layout[i].second * radius};
    };
    const auto pairs = ena::pair_order(g.nodes.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double w = g.edge_weights[p];
        if (w == 0.0 || wmax <= 0.0) continue;
        const double stroke = std::fabs(w) / wmax * 6.0;
        std::string color = solid_color;
        if (g.kind == ena::GraphKind::difference) color = w > 0.0 ? "#b2182b" : "#2166ac";
        const auto [x1, y1] = pos(pairs[p].first);
        const auto [x2, y2] = pos(pairs[p].second);
        out << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
            << "\" y2=\"" << num(y2) << "\" stroke=\"" << color << "\" stroke-width=\""
            << num(stroke, 3) << "\" stroke-opacity=\"0.8\"/>\n";
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto [x, y] = pos(i);
        out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y)
            << "\" r=\"4\" fill=\"#333333\"/>\n";
        const bool left = g.layout[i].first < -0.01;
        const std::string anchor = left ? "end" : (g.layout[i].first > 0.01 ? "start" : "middle");
        out << "<text x=\"" << num(x + (left ? -7.0 : (anchor == "start" ? 7.0 : 0.0))) << "\" y=\""
            << num(y + (g.layout[i].second > 0.5 ? 14.0 : (g.layout[i].second < -0.5 ? -8.0 : 4.0)))
            << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">"
            << escape(g.nodes[i]) << "</text>\n";
    }
}

}  // namespace

std::string network_panels(const ena::GroupNetworks& nets) {
    double wmax = 0.0;
    for (const auto* g : {&nets.high, &nets.low, &nets.difference})
        for (double w : g->edge_weights) wmax = std::max(wmax, std::fabs(w));

    const double panel = 340.0;
    const double width = 3.0 * panel;
    const double height = panel + 40.0;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" fill=\"white\"/>\n";
    const double r = panel / 2.0 - 70.0;
    const double cy = height / 2.0 + 10.0;
    network_panel(out, nets.high, wmax, panel * 0.5, cy, r, "High", "#b2182b");
    network_panel(out, nets.low, wmax, panel * 1.5, cy, r, "Low", "#2166ac");
    network_panel(out, nets.difference, wmax, panel * 2.5, cy, r, "Difference (High - Low)", "#333333");
    out << "</svg>\n";
    return out.str();
}

std::string pr_curve_chart(const std::vector<eval::PrPoint>& points, double ap,
                           const std::string& title) {
    const double margin = 50.0;
    const double plot = 320.0;
    const double width = plot + 2.0 * margin;
    const double height = plot + 2.0 * margin;
    const auto px = [&](double recall) { return margin + recall * plot; };
    const auto py = [&](double precision) { return margin + (1.0 - precision) * plot; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(width / 2.0) << "\" y=\"24\" font-size=\"13\" "
        << "font-family=\"sans-serif\" text-anchor=\"middle\">" << escape(title)
        << " (AP=" << num(ap, 3) << ")</text>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = 0.2 * i;
        out << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(v))
            << "\" y2=\"" << num(py(1)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(px(1))
            << "\" y2=\"" << num(py(v)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(px(v)) << "\" y=\"" << num(py(0) + 16.0)
            << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"middle\">" << num(v, 1)
            << "</text>\n";
        out << "<text x=\"" << num(px(0) - 8.0) << "\" y=\"" << num(py(v) + 3.0)
            << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">" << num(v, 1)
            << "</text>\n";
    }
    out << "<text x=\"" << num(width / 2.0) << "\" y=\"" << num(height - 10.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">Recall</text>\n";
    out << "<text x=\"14\" y=\"" << num(height / 2.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << num(height / 2.0) << ")\">Precision</text>\n";

    if (!points.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#2166ac\" stroke-width=\"2\" points=\"";
        out << num(px(0.0)) << "," << num(py(points.front().precision));
        for (const auto& p : points) out << " " << num(px(p.recall)) << "," << num(py(p.precision));
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string confusion_heatmap(const Matrix& normalized, const std::vector<std::string>& labels) {
    const double cell = 52.0;
    const double left = 170.0;
    const double top = 150.0;
    const double width = left + cell * static_cast<double>(normalized.cols) + 20.0;
    const double height = top + cell * static_cast<double>(normalized.rows) + 20.0;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" fill=\"white\"/>\n";
    for (std::size_t r = 0; r < normalized.rows; ++r) {
        for (std::size_t c = 0; c < normalized.cols; ++c) {
            const double v = std::clamp(normalized(r, c), 0.0, 1.0);
            // white -> blue ramp
            const int red = static_cast<int>(std::lround(255.0 - v * (255.0 - 33.0)));
            const int green = static_cast<int>(std::lround(255.0 - v * (255.0 - 102.0)));
            const int blue = static_cast<int>(std::lround(255.0 - v * (255.0 - 172.0)));
            const double x = left + cell * static_cast<double>(c);
            const double y = top + cell * static_cast<double>(r);
            char color[16];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", red, green, blue);
            out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell)
                << "\" height=\"" << num(cell) << "\" fill=\"" << color
                << "\" stroke=\"#cccccc\"/>\n";
            if (normalized(r, c) > 0.0) {
                out << "<text x=\"" << num(x + cell / 2.0) << "\" y=\"" << num(y + cell / 2.0 + 4.0)
                    << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"middle\" fill=\""
                    << (v > 0.6 ? "white" : "#222222") << "\">" << num(normalized(r, c), 2)
                    << "</text>\n";
            }
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << "<text x=\"" << num(left - 8.0) << "\" y=\""
            << num(top + cell * (static_cast<double>(i) + 0.5) + 4.0)
            << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">"
            << escape(labels[i]) << "</text>\n";
        const double x = left + cell * (static_cast<double>(i) + 0.5);
        out << "<text x=\"" << num(x) << "\" y=\"" << num(top - 10.0)
            << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"start\" transform=\"rotate(-60 "
            << num(x) << " " << num(top - 10.0) << ")\">" << escape(labels[i]) << "</text>\n";
    }
    out << "<text x=\"" << num(left - 120.0) << "\" y=\"" << num(top + cell * static_cast<double>(normalized.rows) / 2.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << num(left - 120.0) << " " << num(top + cell * static_cast<double>(normalized.rows) / 2.0)
        << ")\">Predicted</text>\n";
    out << "<text x=\"" << num(left + cell * static_cast<double>(normalized.cols) / 2.0) << "\" y=\"20\""
        << " font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">True</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace coact::svg
