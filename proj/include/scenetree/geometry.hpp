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

#pragma once

namespace scenetree {

// Axis-aligned pixel box, origin at the image top-left. Coordinates are
// continuous; a well-formed box satisfies x1 <= x2 and y1 <= y2.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  bool operator==(const BBox&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

bool box_ordered(const BBox& b);
bool box_finite(const BBox& b);

double area(const BBox& b);
double intersection_area(const BBox& a, const BBox& b);

// Intersection over union. Returns 0 when the union has zero area.
// Throws std::invalid_argument on an unordered box.
double iou(const BBox& a, const BBox& b);

// Boundary-inclusive containment test.
bool point_in_box(const Point& p, const BBox& b);

// Fraction of `inner` covered by `outer`: area(inner ∩ outer) / area(inner).
// A zero-area `inner` counts as contained iff both corners lie inside.
double containment_ratio(const BBox& inner, const BBox& outer);

Point box_center(const BBox& b);

}  // namespace scenetree
