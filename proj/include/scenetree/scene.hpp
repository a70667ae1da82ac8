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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenetree/geometry.hpp"

namespace scenetree {

// Sentinel labels marking structurally-required but semantically-empty nodes.
inline constexpr std::string_view kPlaceholderPart = "__placeholder_part__";
inline constexpr std::string_view kPlaceholderAction = "__placeholder_action__";

// Label identity everywhere in the toolkit is equality after normalization:
// lowercase, trimmed, internal whitespace runs collapsed to a single space.
std::string normalize_label(std::string_view s);

struct Affordance {
  std::string action;
  Point point;
  // Valid interaction region; carried by ground truth only. When absent the
  // parent part box acts as the fallback region.
  std::optional<BBox> affordance_box;

  bool is_placeholder() const {
    return normalize_label(action) == kPlaceholderAction;
  }
};

struct PartNode {
  std::string name;
  BBox bbox;
  std::vector<Affordance> affordances;

  bool is_placeholder() const {
    return normalize_label(name) == kPlaceholderPart;
  }
};

struct ObjectNode {
  std::string name;
  BBox bbox;
  std::vector<PartNode> parts;
};

// One image's hierarchy, ground truth or predicted. `objects` may be empty.
struct SceneRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::optional<std::string> target_category;
  std::vector<ObjectNode> objects;
};

// Removes every placeholder part and placeholder affordance. Idempotent;
// everything else keeps its relative order.
SceneRecord strip_placeholders(const SceneRecord& r);

// Which structural expansion a ground-truth object requires. Expects
// placeholders to be stripped first.
enum class ExpansionPattern { kNone, kPartsOnly, kAffordancesOnly, kBoth };

ExpansionPattern eligibility(const ObjectNode& o);

inline bool pattern_requires_parts(ExpansionPattern p) {
  return p == ExpansionPattern::kPartsOnly || p == ExpansionPattern::kBoth;
}
inline bool pattern_requires_affordances(ExpansionPattern p) {
  return p == ExpansionPattern::kAffordancesOnly || p == ExpansionPattern::kBoth;
}

std::size_t count_parts(const SceneRecord& r);
std::size_t count_affordances(const SceneRecord& r);
std::size_t count_affordances(const ObjectNode& o);

struct ValidationIssue {
  std::string path;     // e.g. "objects[1].parts[0].bbox"
  std::string code;     // stable machine-readable code
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
};

struct ValidationConfig {
  // Minimum intersection(part, object) / area(part) before a containment
  // warning fires.
  double containment_min = 0.95;
};

// Structural read-time checks.
//
// Errors: BAD_DIMENSIONS, BOX_ORDER, NOT_FINITE, OUT_OF_BOUNDS, EMPTY_LABEL,
// PLACEHOLDER_CHILD (placeholder part carrying a real affordance).
// Warnings: CONTAINMENT (part poorly contained in its object), POINT_OUTSIDE
// (affordance point outside its parent part box), DEGENERATE (zero-area box).
ValidationReport validate_scene(const SceneRecord& r,
                                const ValidationConfig& cfg = {});

}  // namespace scenetree
