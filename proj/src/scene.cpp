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

#include "scenetree/scene.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace scenetree {

std::string normalize_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

SceneRecord strip_placeholders(const SceneRecord& r) {
  SceneRecord out = r;
  for (auto& object : out.objects) {
    std::vector<PartNode> kept_parts;
    kept_parts.reserve(object.parts.size());
    for (auto& part : object.parts) {
      if (part.is_placeholder()) continue;
      std::vector<Affordance> kept_affs;
      kept_affs.reserve(part.affordances.size());
      for (auto& aff : part.affordances) {
        if (!aff.is_placeholder()) kept_affs.push_back(aff);
      }
      part.affordances = std::move(kept_affs);
      kept_parts.push_back(std::move(part));
    }
    object.parts = std::move(kept_parts);
  }
  return out;
}

ExpansionPattern eligibility(const ObjectNode& o) {
  const bool has_parts = !o.parts.empty();
  bool has_affordances = false;
  for (const auto& part : o.parts) {
    if (!part.affordances.empty()) {
      has_affordances = true;
      break;
    }
  }
  if (has_parts && has_affordances) return ExpansionPattern::kBoth;
  if (has_parts) return ExpansionPattern::kPartsOnly;
  if (has_affordances) return ExpansionPattern::kAffordancesOnly;
  return ExpansionPattern::kNone;
}

std::size_t count_parts(const SceneRecord& r) {
  std::size_t n = 0;
  for (const auto& o : r.objects) n += o.parts.size();
  return n;
}

std::size_t count_affordances(const ObjectNode& o) {
  std::size_t n = 0;
  for (const auto& p : o.parts) n += p.affordances.size();
  return n;
}

std::size_t count_affordances(const SceneRecord& r) {
  std::size_t n = 0;
  for (const auto& o : r.objects) n += count_affordances(o);
  return n;
}

namespace {

class Validator {
 public:
  Validator(const SceneRecord& r, const ValidationConfig& cfg)
      : record_(r), cfg_(cfg) {}

  ValidationReport run() {
    if (record_.width <= 0 || record_.height <= 0) {
      error("", "BAD_DIMENSIONS",
            "width and height must be positive, got " +
                std::to_string(record_.width) + "x" +
                std::to_string(record_.height));
    }
    for (std::size_t i = 0; i < record_.objects.size(); ++i) {
      check_object(record_.objects[i], "objects[" + std::to_string(i) + "]");
    }
    return std::move(report_);
  }

 private:
  void check_object(const ObjectNode& o, const std::string& path) {
    check_label(o.name, path + ".name");
    check_box(o.bbox, path + ".bbox");
    for (std::size_t j = 0; j < o.parts.size(); ++j) {
      check_part(o, o.parts[j], path + ".parts[" + std::to_string(j) + "]");
    }
  }

  void check_part(const ObjectNode& parent, const PartNode& p,
                  const std::string& path) {
    check_label(p.name, path + ".name");
    const bool box_usable = check_box(p.bbox, path + ".bbox");
    if (box_usable && box_ordered(parent.bbox) &&
        containment_ratio(p.bbox, parent.bbox) < cfg_.containment_min) {
      warning(path + ".bbox", "CONTAINMENT",
              "part box containment in parent object below " +
                  std::to_string(cfg_.containment_min));
    }
    const bool placeholder_part = p.is_placeholder();
    for (std::size_t k = 0; k < p.affordances.size(); ++k) {
      const std::string apath = path + ".affordances[" + std::to_string(k) + "]";
      const Affordance& a = p.affordances[k];
      check_label(a.action, apath + ".action");
      check_point(a.point, apath + ".point");
      if (a.affordance_box) check_box(*a.affordance_box, apath + ".affordance_box");
      if (placeholder_part && !a.is_placeholder()) {
        error(apath, "PLACEHOLDER_CHILD",
              "placeholder part carries a non-placeholder affordance");
      }
      if (box_usable && !point_in_box(a.point, p.bbox)) {
        warning(apath + ".point", "POINT_OUTSIDE",
                "affordance point lies outside the parent part box");
      }
    }
  }

  // Returns true when the box is ordered and finite (usable downstream).
  bool check_box(const BBox& b, const std::string& path) {
    if (!box_finite(b)) {
      error(path, "NOT_FINITE", "box has non-finite coordinates");
      return false;
    }
    if (!box_ordered(b)) {
      error(path, "BOX_ORDER", "box coordinates not ordered (x1<=x2, y1<=y2)");
      return false;
    }
    if (in_bounds()) {
      if (b.x1 < 0.0 || b.y1 < 0.0 || b.x2 > record_.width ||
          b.y2 > record_.height) {
        error(path, "OUT_OF_BOUNDS", "box exceeds image bounds");
      }
    }
    if (area(b) <= 0.0) {
      warning(path, "DEGENERATE", "box has zero area");
    }
    return true;
  }

  void check_point(const Point& p, const std::string& path) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      error(path, "NOT_FINITE", "point has non-finite coordinates");
      return;
    }
    if (in_bounds() &&
        (p.x < 0.0 || p.y < 0.0 || p.x > record_.width || p.y > record_.height)) {
      error(path, "OUT_OF_BOUNDS", "point exceeds image bounds");
    }
  }

  void check_label(const std::string& label, const std::string& path) {
    if (normalize_label(label).empty()) {
      error(path, "EMPTY_LABEL", "label is empty after normalization");
    }
  }

  bool in_bounds() const { return record_.width > 0 && record_.height > 0; }

  void error(const std::string& path, const std::string& code,
             const std::string& message) {
    report_.errors.push_back({path, code, message});
  }
  void warning(const std::string& path, const std::string& code,
               const std::string& message) {
    report_.warnings.push_back({path, code, message});
  }

  const SceneRecord& record_;
  const ValidationConfig& cfg_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_scene(const SceneRecord& r,
                                const ValidationConfig& cfg) {
  return Validator(r, cfg).run();
}

}  // namespace scenetree
