#pragma once

#include <string>
#include <vector>

#include "coact/ena.hpp"
#include "coact/eval.hpp"
#include "coact/linalg.hpp"

namespace coact::svg {

// 9-stop blue-white-red ramp; t in [-1, 1], exactly mid-palette at 0.
std::string diverging_color(double t);

// Three aligned panels (High / Low / Difference), rows = channels, columns =
// normalized time 0..1. All panels use the diverging palette; the difference
// panel is centered at exactly 0 with its own symmetric range.
std::string heatmap_triptych(const Matrix& high, const Matrix& low, const Matrix& diff,
                             const std::vector<std::string>& channels);

// Circular node layout in taxonomy order; edge stroke width proportional to
// |weight| on a scale shared across the three panels; difference edges
// colored by sign.
std::string network_panels(const ena::GroupNetworks& nets);

std::string pr_curve_chart(const std::vector<eval::PrPoint>& points, double ap,
                           const std::string& title);

std::string confusion_heatmap(const Matrix& normalized, const std::vector<std::string>& labels);

}  // namespace coact::svg
