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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scenetree/scene.hpp"

namespace scenetree {

// One un-nested object-part-affordance prediction.
struct TripletRecord {
  std::string object;
  BBox object_box;
  std::string part;
  BBox part_box;
  std::string action;
  Point affordance_point;
};

// Groups triplets into a hierarchy: objects keyed by (normalized name, exact
// box) in first-appearance order, parts likewise within each object, and each
// (action, point) attached to its part. Exact duplicates (equal normalized
// action and equal point under the same part) are dropped; the count of
// dropped duplicates is returned through `dropped_duplicates` when non-null.
SceneRecord to_hierarchy(std::span<const TripletRecord> triplets,
                         std::size_t* dropped_duplicates = nullptr);

// Inverse direction: one triplet per affordance, depth-first in stored order.
// Zero-affordance parts and part-less objects cannot be represented and are
// dropped. Input must be placeholder-free.
std::vector<TripletRecord> flatten(const SceneRecord& r);

// Flat-triplet document: {"triplets": [{"object", "object_box", "part",
// "part_box", "action", "affordance_point"}]}, with optional "image_id",
// "width", "height" alongside. Boxes and points are either plain number
// arrays or coordinate-token strings (decoded against width/height).
struct FlatDocument {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<TripletRecord> triplets;
};

// Throws std::runtime_error on schema violations. `default_width` /
// `default_height` apply when the document carries no dimensions; token
// coordinates require positive extents from one of the two sources.
FlatDocument flat_from_json(const nlohmann::json& j, int default_width,
                            int default_height);

nlohmann::ordered_json flat_to_json(const FlatDocument& doc);

// Reads either a single JSON document or JSONL of documents.
std::vector<FlatDocument> read_flat_file(const std::filesystem::path& path,
                                         int default_width, int default_height);

void write_flat_file(std::span<const FlatDocument> docs,
                     const std::filesystem::path& path);

}  // namespace scenetree
