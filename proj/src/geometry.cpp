#include "coact/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace coact {

double iou(const BoundingBox& a, const BoundingBox& b) {
    a.validate();
    b.validate();
    const double ix1 = std::max(a.x1, b.x1);
    const double iy1 = std::max(a.y1, b.y1);
    const double ix2 = std::min(a.x2, b.x2);
    const double iy2 = std::min(a.y2, b.y2);
    const double iw = ix2 - ix1;
    const double ih = iy2 - iy1;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

BoundingBox mask_region(const BoundingBox& box, double fraction) {
    box.validate();
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("mask_region: fraction must be in (0,1]");
    return BoundingBox{box.x1, box.y1, box.x2, box.y1 + fraction * (box.y2 - box.y1)};
}

std::vector<BoundingBox> mask_regions(const std::vector<BoundingBox>& boxes, double fraction) {
    std::vector<BoundingBox> out;
    out.reserve(boxes.size());
    for (const auto& b : boxes) out.push_back(mask_region(b, fraction));
    return out;
}

}  // namespace coact
