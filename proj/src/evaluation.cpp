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

#include "scenetree/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scenetree {

namespace {

double round1(double pct) { return std::round(pct * 10.0) / 10.0; }

SceneRecord filter_to_target(const SceneRecord& gt) {
  if (!gt.target_category) {
    throw std::invalid_argument("object mode requires target_category on GT record " +
                                gt.image_id);
  }
  const std::string target = normalize_label(*gt.target_category);
  SceneRecord filtered = gt;
  filtered.objects.clear();
  for (const auto& o : gt.objects) {
    if (normalize_label(o.name) == target) filtered.objects.push_back(o);
  }
  return filtered;
}

}  // namespace

LevelMetrics make_level_metrics(const LevelCounts& counts) {
  LevelMetrics m;
  m.counts = counts;
  const double tp = static_cast<double>(counts.tp);
  if (counts.tp + counts.fp > 0) m.precision = tp / static_cast<double>(counts.tp + counts.fp);
  if (counts.tp + counts.fn > 0) m.recall = tp / static_cast<double>(counts.tp + counts.fn);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

EvalReport evaluate_corpus(std::span<const SceneRecord> preds,
                           std::span<const SceneRecord> gts,
                           const std::vector<double>& taus, EvalMode mode) {
  if (taus.empty()) {
    throw std::invalid_argument("evaluate_corpus: empty threshold list");
  }

  std::map<std::string, const SceneRecord*> pred_by_id;
  for (const auto& p : preds) {
    if (!pred_by_id.emplace(p.image_id, &p).second) {
      throw std::invalid_argument("duplicate prediction image_id " + p.image_id);
    }
  }
  std::map<std::string, bool> gt_seen;
  for (const auto& g : gts) {
    if (!gt_seen.emplace(g.image_id, true).second) {
      throw std::invalid_argument("duplicate ground-truth image_id " + g.image_id);
    }
  }

  EvalReport report;
  report.mode = mode;
  report.gt_records = gts.size();
  for (double tau : taus) report.thresholds.push_back({tau, {}});

  std::vector<std::array<LevelCounts, 3>> sums(taus.size());
  ParseRateCounts parse_sum;
  const SceneRecord empty_pred;

  for (const auto& gt_raw : gts) {
    SceneRecord gt = strip_placeholders(gt_raw);
    if (mode == EvalMode::kObject) gt = filter_to_target(gt);

    SceneRecord pred;
    auto it = pred_by_id.find(gt_raw.image_id);
    if (it != pred_by_id.end()) {
      pred = strip_placeholders(*it->second);
      ++report.pred_records_used;
    } else {
      pred = empty_pred;
      report.warnings.push_back("no prediction for image_id " + gt_raw.image_id +
                                "; counted as false negatives");
    }

    for (std::size_t t = 0; t < taus.size(); ++t) {
      const ObjectMatching l1 = match_objects(pred, gt, taus[t]);
      const PartMatching l2 = match_parts(l1, pred, gt, taus[t]);
      const AffordanceMatching l3 = match_affordances(l2, pred, gt);
      sums[t][0] += l1.counts;
      sums[t][1] += l2.counts;
      sums[t][2] += l3.counts;
    }
    parse_sum += parse_rate(pred, gt);
  }

  for (const auto& p : preds) {
    if (!gt_seen.count(p.image_id)) {
      report.warnings.push_back("prediction image_id " + p.image_id +
                                " has no ground truth; skipped");
    }
  }

  for (std::size_t t = 0; t < taus.size(); ++t) {
    for (int level = 0; level < 3; ++level) {
      report.thresholds[t].levels[level] = make_level_metrics(sums[t][level]);
    }
  }
  report.parse_eligible = parse_sum.eligible;
  report.parse_complete = parse_sum.complete;
  if (parse_sum.eligible > 0) {
    report.parse_rate = static_cast<double>(parse_sum.complete) /
                        static_cast<double>(parse_sum.eligible);
  }
  return report;
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["mode"] = report.mode == EvalMode::kObject ? "object" : "scene";
  doc["gt_records"] = report.gt_records;
  doc["pred_records_used"] = report.pred_records_used;
  doc["thresholds"] = nlohmann::ordered_json::array();
  static const char* kLevelNames[3] = {"L1", "L2", "L3"};
  for (const auto& tm : report.thresholds) {
    nlohmann::ordered_json jt;
    jt["iou"] = tm.tau;
    for (int level = 0; level < 3; ++level) {
      const LevelMetrics& m = tm.levels[level];
      nlohmann::ordered_json jl;
      jl["tp"] = m.counts.tp;
      jl["fp"] = m.counts.fp;
      jl["fn"] = m.counts.fn;
      jl["precision"] = m.precision;
      jl["recall"] = m.recall;
      jl["f1"] = m.f1;
      jl["precision_pct"] = round1(m.precision * 100.0);
      jl["recall_pct"] = round1(m.recall * 100.0);
      jl["f1_pct"] = round1(m.f1 * 100.0);
      jt[kLevelNames[level]] = std::move(jl);
    }
    doc["thresholds"].push_back(std::move(jt));
  }
  doc["parse_rate"] = nlohmann::ordered_json();
  doc["parse_rate_pct"] = nlohmann::ordered_json();
  if (report.parse_rate) {
    doc["parse_rate"] = *report.parse_rate;
    doc["parse_rate_pct"] = round1(*report.parse_rate * 100.0);
  }
  doc["parse_eligible"] = report.parse_eligible;
  doc["parse_complete"] = report.parse_complete;
  doc["warnings"] = report.warnings;
  return doc;
}

std::string format_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "level  iou    P       R       F1      TP        FP        FN\n";
  static const char* kLevelNames[3] = {"L1", "L2", "L3"};
  for (const auto& tm : report.thresholds) {
    for (int level = 0; level < 3; ++level) {
      const LevelMetrics& m = tm.levels[level];
      out << std::left << std::setw(7) << kLevelNames[level];
      out << std::setw(7) << std::setprecision(2) << tm.tau << std::setprecision(1);
      out << std::setw(8) << m.precision * 100.0;
      out << std::setw(8) << m.recall * 100.0;
      out << std::setw(8) << m.f1 * 100.0;
      out << std::setw(10) << m.counts.tp;
      out << std::setw(10) << m.counts.fp;
      out << std::setw(10) << m.counts.fn;
      out << '\n';
    }
  }
  out << "parse_rate ";
  if (report.parse_rate) {
    out << *report.parse_rate * 100.0;
  } else {
    out << "n/a";
  }
  out << "  (complete " << report.parse_complete << " / eligible "
      << report.parse_eligible << ", iou " << std::setprecision(2)
      << kParseRateIou << ")\n";
  return out.str();
}

}  // namespace scenetree
