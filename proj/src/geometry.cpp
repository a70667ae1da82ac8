// Copyright 2026 The SceneTree Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scenetree/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scenetree {

bool box_ordered(const BBox& b) { return b.x1 <= b.x2 && b.y1 <= b.y2; }

bool box_finite(const BBox& b) {
  return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
         std::isfinite(b.y2);
}

double area(const BBox& b) {
  const double w = b.x2 - b.x1;
  const double h = b.y2 - b.y1;
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BBox& a, const BBox& b) {
  if (!box_ordered(a) || !box_ordered(b)) {
    throw std::invalid_argument("iou: box coordinates not ordered");
  }
  const double inter = intersection_area(a, b);
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

bool point_in_box(const Point& p, const BBox& b) {
  return p.x >= b.x1 && p.x <= b.x2 && p.y >= b.y1 && p.y <= b.y2;
}

double containment_ratio(const BBox& inner, const BBox& outer) {
  const double inner_area = area(inner);
  if (inner_area <= 0.0) {
    const bool inside = point_in_box({inner.x1, inner.y1}, outer) &&
                        point_in_box({inner.x2, inner.y2}, outer);
    return inside ? 1.0 : 0.0;
  }
  return intersection_area(inner, outer) / inner_area;
}

Point box_center(const BBox& b) {
  return {(b.x1 + b.x2) * 0.5, (b.y1 + b.y2) * 0.5};
}

}  // namespace scenetree
