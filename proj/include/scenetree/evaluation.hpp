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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scenetree/matching.hpp"
#include "scenetree/scene.hpp"

namespace scenetree {

// object: ground truth is restricted to the record's target category and
// off-target predictions stay in as false positives. scene: everything counts.
enum class EvalMode { kObject, kScene };

struct LevelMetrics {
  LevelCounts counts;
  double precision = 0.0;  // tp/(tp+fp), 0 when undefined
  double recall = 0.0;     // tp/(tp+fn), 0 when undefined
  double f1 = 0.0;         // 2PR/(P+R), 0 when undefined
};

struct ThresholdMetrics {
  double tau = 0.0;
  std::array<LevelMetrics, 3> levels;  // L1, L2, L3
};

struct EvalReport {
  EvalMode mode = EvalMode::kScene;
  std::vector<ThresholdMetrics> thresholds;
  std::int64_t parse_eligible = 0;
  std::int64_t parse_complete = 0;
  std::optional<double> parse_rate;  // null when no object was eligible
  std::size_t gt_records = 0;
  std::size_t pred_records_used = 0;
  std::vector<std::string> warnings;  // skipped predictions etc.
};

LevelMetrics make_level_metrics(const LevelCounts& counts);

// Micro-accumulated evaluation over a joined corpus. Placeholders are
// stripped internally; ParseRate is always judged at IoU 0.5. Ground-truth
// records without a prediction count as pure false negatives; predictions
// without ground truth are skipped with a warning. Throws
// std::invalid_argument on duplicate image ids, an empty threshold list, or
// a missing target_category in object mode.
EvalReport evaluate_corpus(std::span<const SceneRecord> preds,
                           std::span<const SceneRecord> gts,
                           const std::vector<double>& taus, EvalMode mode);

// Machine-readable report; fractions carried both raw and as percentages
// rounded to one decimal.
nlohmann::ordered_json report_to_json(const EvalReport& report);

// Fixed-width P/R/F1 per level table plus the parse-rate line.
std::string format_report_table(const EvalReport& report);

}  // namespace scenetree
