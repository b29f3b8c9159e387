#pragma once

#include <vector>

#include "coact/types.hpp"

namespace coact {

// Intersection over union of two valid boxes. 0 when disjoint.
double iou(const BoundingBox& a, const BoundingBox& b);

// Geometry of the privacy mask: the upper `fraction` of the box,
// "upper" meaning smaller y (raster convention).
BoundingBox mask_region(const BoundingBox& box, double fraction = 0.20);

std::vector<BoundingBox> mask_regions(const std::vector<BoundingBox>& boxes, double fraction = 0.20);

}  // namespace coact
