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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "scenetree/scene.hpp"

namespace scenetree {

// IoU threshold at which structural completeness is judged.
inline constexpr double kParseRateIou = 0.5;

struct LevelCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  LevelCounts& operator+=(const LevelCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const LevelCounts&) const = default;
};

struct ObjectPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct ObjectMatching {
  std::vector<ObjectPair> pairs;
  LevelCounts counts;
};

struct PartPair {
  std::size_t pred_object = 0;
  std::size_t gt_object = 0;
  std::size_t pred_part = 0;
  std::size_t gt_part = 0;
  double iou = 0.0;
};

struct PartMatching {
  std::vector<PartPair> pairs;
  LevelCounts counts;
};

struct AffordancePair {
  std::size_t pred_object = 0;
  std::size_t gt_object = 0;
  std::size_t pred_part = 0;
  std::size_t gt_part = 0;
  std::size_t pred_affordance = 0;
  std::size_t gt_affordance = 0;
};

struct AffordanceMatching {
  std::vector<AffordancePair> pairs;
  LevelCounts counts;
};

// Level-1 greedy one-to-one assignment over objects. Candidates require equal
// normalized names and IoU >= tau; they are consumed by IoU descending with
// (pred index, gt index) tie-break. Inputs must be placeholder-free. Throws
// std::invalid_argument unless 0 < tau <= 1.
ObjectMatching match_objects(const SceneRecord& pred, const SceneRecord& gt,
                             double tau);

// Level-2: the same greedy procedure over the part lists of each matched
// object pair. Every predicted part without a true-positive chain counts as
// a false positive (including parts of unmatched predicted objects); ground
// truth symmetrically as false negatives.
PartMatching match_parts(const ObjectMatching& objects, const SceneRecord& pred,
                         const SceneRecord& gt, double tau);

// Level-3: within each matched part pair, candidates require equal normalized
// actions and the predicted point inside the ground-truth valid region (the
// affordance box when recorded, the parent part box otherwise). No continuous
// score exists, so greedy order is (pred index, gt index).
AffordanceMatching match_affordances(const PartMatching& parts,
                                     const SceneRecord& pred,
                                     const SceneRecord& gt);

struct ParseRateCounts {
  std::int64_t complete = 0;
  std::int64_t eligible = 0;

  ParseRateCounts& operator+=(const ParseRateCounts& o) {
    complete += o.complete;
    eligible += o.eligible;
    return *this;
  }
};

// Structural completeness over parse-eligible ground-truth objects, matched
// at IoU 0.5. A matched object is complete when its prediction carries parts
// and/or affordances wherever the ground-truth pattern requires them.
ParseRateCounts parse_rate(const SceneRecord& pred, const SceneRecord& gt);

}  // namespace scenetree
