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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scenetree/scene.hpp"

namespace scenetree {

// One stage-3 affordance annotation awaiting attachment to a part.
struct AffordanceAnnotation {
  std::string action;
  Point point;
  std::optional<BBox> box;
  std::optional<std::string> interaction_part;  // free-form part description
  std::optional<double> confidence;
};

struct QcConfig {
  double containment_min = 0.95;  // part-in-object containment floor
  double dup_iou = 0.9;           // same-name siblings above this collapse
  double min_confidence = 0.0;    // annotations below are discarded
};

// Per-event provenance, one list per outcome; the counters are the sizes.
struct QcReport {
  std::vector<std::string> assigned_textual;
  std::vector<std::string> assigned_geometric;
  std::vector<std::string> dropped_unassigned;
  std::vector<std::string> dropped_duplicates;
  std::vector<std::string> dropped_containment;
  std::vector<std::string> dropped_low_confidence;

  void merge(const QcReport& other);
};

// Attaches annotations to the object's existing parts. Per annotation, in
// order: confidence gate; textual match on the normalized interaction part
// name; geometric match among point-containing parts (max annotation-box
// overlap ratio when a box exists, smallest containing part otherwise);
// otherwise dropped as unassigned. Never adds or removes parts.
ObjectNode assign_affordances(const ObjectNode& object,
                              std::span<const AffordanceAnnotation> annotations,
                              const QcConfig& cfg, QcReport& report);

// Consistency cleanup: removes poorly-contained parts (with their
// affordances), affordance points outside their parent part box, and
// same-name duplicate objects/parts at IoU >= dup_iou (first occurrence
// wins). Idempotent under a fixed config.
SceneRecord qc_clean(const SceneRecord& r, const QcConfig& cfg, QcReport& report);

nlohmann::ordered_json qc_report_to_json(const QcReport& report);

// Annotation JSONL line:
//   {"image_id": str, "object_index": int, "annotations":
//     [{"action": str, "point": [f,f], "box": [f,f,f,f]|null,
//       "interaction_part": str|null, "confidence": f|null}]}
struct AnnotationGroup {
  std::string image_id;
  std::size_t object_index = 0;
  std::vector<AffordanceAnnotation> annotations;
};

std::vector<AnnotationGroup> read_annotation_jsonl(
    const std::filesystem::path& path);

}  // namespace scenetree
