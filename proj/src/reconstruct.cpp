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

#include "scenetree/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scenetree {

using nlohmann::json;

void QcReport::merge(const QcReport& other) {
  auto append = [](std::vector<std::string>& dst, const std::vector<std::string>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
  };
  append(assigned_textual, other.assigned_textual);
  append(assigned_geometric, other.assigned_geometric);
  append(dropped_unassigned, other.dropped_unassigned);
  append(dropped_duplicates, other.dropped_duplicates);
  append(dropped_containment, other.dropped_containment);
  append(dropped_low_confidence, other.dropped_low_confidence);
}

ObjectNode assign_affordances(const ObjectNode& object,
                              std::span<const AffordanceAnnotation> annotations,
                              const QcConfig& cfg, QcReport& report) {
  ObjectNode out = object;
  for (std::size_t a = 0; a < annotations.size(); ++a) {
    const AffordanceAnnotation& ann = annotations[a];
    const std::string who = "annotation[" + std::to_string(a) + "] \"" +
                            ann.action + "\" on object \"" + object.name + "\"";

    if (ann.confidence && *ann.confidence < cfg.min_confidence) {
      report.dropped_low_confidence.push_back(
          who + ": confidence " + std::to_string(*ann.confidence) + " below " +
          std::to_string(cfg.min_confidence));
      continue;
    }

    PartNode* host = nullptr;
    bool textual = false;
    if (ann.interaction_part) {
      const std::string wanted = normalize_label(*ann.interaction_part);
      for (auto& part : out.parts) {
        if (normalize_label(part.name) == wanted) {
          host = &part;
          textual = true;
          break;
        }
      }
    }

    if (!host) {
      // Geometric fallback over parts containing the point: best annotation
      // overlap when a box exists, otherwise the most specific (smallest) part.
      const double ann_area = ann.box ? area(*ann.box) : 0.0;
      double best_overlap = -1.0;
      double best_area = std::numeric_limits<double>::infinity();
      for (auto& part : out.parts) {
        if (!point_in_box(ann.point, part.bbox)) continue;
        if (ann.box && ann_area > 0.0) {
          const double overlap = intersection_area(*ann.box, part.bbox) / ann_area;
          if (overlap > best_overlap) {
            best_overlap = overlap;
            host = &part;
          }
        } else {
          const double part_area = area(part.bbox);
          if (part_area < best_area) {
            best_area = part_area;
            host = &part;
          }
        }
      }
    }

    if (!host) {
      report.dropped_unassigned.push_back(who + ": no part contains the point");
      continue;
    }
    host->affordances.push_back({ann.action, ann.point, ann.box});
    (textual ? report.assigned_textual : report.assigned_geometric)
        .push_back(who + " -> part \"" + host->name + "\"");
  }
  return out;
}

namespace {

// First-keep duplicate filter: an entry is dropped when it shares a
// normalized name and IoU >= dup_iou with any earlier kept sibling.
template <typename Node>
std::vector<bool> duplicate_mask(const std::vector<Node>& nodes, double dup_iou) {
  std::vector<bool> dropped(nodes.size(), false);
  std::vector<std::string> names(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) names[i] = normalize_label(nodes[i].name);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (dropped[j] || names[i] != names[j]) continue;
      if (iou(nodes[i].bbox, nodes[j].bbox) >= dup_iou) {
        dropped[i] = true;
        break;
      }
    }
  }
  return dropped;
}

}  // namespace

SceneRecord qc_clean(const SceneRecord& r, const QcConfig& cfg, QcReport& report) {
  SceneRecord out = r;
  out.objects.clear();

  const auto object_dropped = duplicate_mask(r.objects, cfg.dup_iou);
  for (std::size_t i = 0; i < r.objects.size(); ++i) {
    const std::string opath = r.image_id + "/objects[" + std::to_string(i) + "]";
    if (object_dropped[i]) {
      report.dropped_duplicates.push_back(opath + " \"" + r.objects[i].name +
                                          "\": duplicate object");
      continue;
    }
    ObjectNode object = r.objects[i];

    std::vector<PartNode> contained;
    contained.reserve(object.parts.size());
    for (std::size_t j = 0; j < object.parts.size(); ++j) {
      const PartNode& part = object.parts[j];
      if (containment_ratio(part.bbox, object.bbox) < cfg.containment_min) {
        report.dropped_containment.push_back(
            opath + ".parts[" + std::to_string(j) + "] \"" + part.name +
            "\": containment below " + std::to_string(cfg.containment_min));
        continue;
      }
      contained.push_back(part);
    }

    const auto part_dropped = duplicate_mask(contained, cfg.dup_iou);
    object.parts.clear();
    for (std::size_t j = 0; j < contained.size(); ++j) {
      if (part_dropped[j]) {
        report.dropped_duplicates.push_back(opath + " part \"" +
                                            contained[j].name +
                                            "\": duplicate part");
        continue;
      }
      PartNode part = contained[j];
      std::vector<Affordance> kept;
      kept.reserve(part.affordances.size());
      for (std::size_t k = 0; k < part.affordances.size(); ++k) {
        const Affordance& aff = part.affordances[k];
        if (!point_in_box(aff.point, part.bbox)) {
          report.dropped_containment.push_back(
              opath + " part \"" + part.name + "\" affordance[" +
              std::to_string(k) + "] \"" + aff.action +
              "\": point outside part box");
          continue;
        }
        kept.push_back(aff);
      }
      part.affordances = std::move(kept);
      object.parts.push_back(std::move(part));
    }
    out.objects.push_back(std::move(object));
  }
  return out;
}

nlohmann::ordered_json qc_report_to_json(const QcReport& report) {
  nlohmann::ordered_json doc;
  auto emit = [&doc](const char* key, const std::vector<std::string>& entries) {
    doc["counts"][key] = entries.size();
    doc["provenance"][key] = entries;
  };
  emit("assigned_textual", report.assigned_textual);
  emit("assigned_geometric", report.assigned_geometric);
  emit("dropped_unassigned", report.dropped_unassigned);
  emit("dropped_duplicates", report.dropped_duplicates);
  emit("dropped_containment", report.dropped_containment);
  emit("dropped_low_confidence", report.dropped_low_confidence);
  return doc;
}

std::vector<AnnotationGroup> read_annotation_jsonl(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<AnnotationGroup> groups;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + " line " + std::to_string(line_number);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("image_id") || !j["image_id"].is_string() ||
        !j.contains("object_index") || !j["object_index"].is_number_integer() ||
        !j.contains("annotations") || !j["annotations"].is_array()) {
      throw std::runtime_error(where +
                               ": expected {image_id, object_index, annotations}");
    }
    AnnotationGroup group;
    group.image_id = j["image_id"].get<std::string>();
    const auto index = j["object_index"].get<std::int64_t>();
    if (index < 0) throw std::runtime_error(where + ": negative object_index");
    group.object_index = static_cast<std::size_t>(index);

    for (const auto& ja : j["annotations"]) {
      AffordanceAnnotation ann;
      if (!ja.is_object() || !ja.contains("action") || !ja["action"].is_string() ||
          !ja.contains("point") || !ja["point"].is_array() ||
          ja["point"].size() != 2 || !ja["point"][0].is_number() ||
          !ja["point"][1].is_number()) {
        throw std::runtime_error(where + ": malformed annotation entry");
      }
      ann.action = ja["action"].get<std::string>();
      if (normalize_label(ann.action).empty()) {
        throw std::runtime_error(where + ": empty annotation action");
      }
      ann.point = {ja["point"][0].get<double>(), ja["point"][1].get<double>()};
      if (ja.contains("box") && !ja["box"].is_null()) {
        const json& jb = ja["box"];
        if (!jb.is_array() || jb.size() != 4 || !jb[0].is_number() ||
            !jb[1].is_number() || !jb[2].is_number() || !jb[3].is_number()) {
          throw std::runtime_error(where + ": malformed annotation box");
        }
        BBox b{jb[0].get<double>(), jb[1].get<double>(), jb[2].get<double>(),
               jb[3].get<double>()};
        if (!box_finite(b) || !box_ordered(b)) {
          throw std::runtime_error(where + ": annotation box not a valid box");
        }
        ann.box = b;
      }
      if (ja.contains("interaction_part") && !ja["interaction_part"].is_null()) {
        if (!ja["interaction_part"].is_string()) {
          throw std::runtime_error(where + ": interaction_part must be a string");
        }
        ann.interaction_part = ja["interaction_part"].get<std::string>();
      }
      if (ja.contains("confidence") && !ja["confidence"].is_null()) {
        if (!ja["confidence"].is_number()) {
          throw std::runtime_error(where + ": confidence must be a number");
        }
        ann.confidence = ja["confidence"].get<double>();
      }
      group.annotations.push_back(std::move(ann));
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace scenetree
