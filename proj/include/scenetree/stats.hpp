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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scenetree/scene.hpp"

namespace scenetree {

struct Composition {
  std::string object;  // normalized labels
  std::string part;
  std::string action;
  std::int64_t count = 0;
};

struct StatsReport {
  std::int64_t image_count = 0;
  std::int64_t object_count = 0;
  std::int64_t part_count = 0;
  std::int64_t affordance_count = 0;
  // Affordances reachable through an object-part chain. Always equals
  // affordance_count in this data model; kept separate so any divergence
  // surfaces as a data error.
  std::int64_t chain_count = 0;

  std::int64_t object_categories = 0;  // distinct normalized labels
  std::int64_t part_categories = 0;
  std::int64_t action_categories = 0;

  double mean_parts_per_object = 0.0;      // over all objects
  double mean_affordances_per_part = 0.0;  // over all parts

  std::vector<Composition> top_compositions;  // count desc, ties lexicographic
  std::int64_t composition_total = 0;         // sum over ALL compositions

  // Objects per required expansion pattern; "none" entries are not
  // parse-eligible.
  std::int64_t pattern_none = 0;
  std::int64_t pattern_parts_only = 0;
  std::int64_t pattern_affordances_only = 0;
  std::int64_t pattern_both = 0;

  // Raw spellings folded into one category by normalization; only categories
  // with more than one raw variant are listed.
  std::map<std::string, std::vector<std::string>> object_variants;
  std::map<std::string, std::vector<std::string>> part_variants;
  std::map<std::string, std::vector<std::string>> action_variants;
};

// Single-pass corpus statistics. Placeholder entries are never counted;
// records are stripped internally.
StatsReport corpus_stats(std::span<const SceneRecord> records, std::size_t top_k);

nlohmann::ordered_json stats_to_json(const StatsReport& report);

std::string format_stats_table(const StatsReport& report);

}  // namespace scenetree
