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

#include "scenetree/matching.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace scenetree {

namespace {

struct Candidate {
  std::size_t pred;
  std::size_t gt;
  double iou;
};

// Greedy one-to-one assignment: IoU descending, ties by (pred, gt) ascending.
std::vector<Candidate> greedy_assign(std::vector<Candidate> candidates,
                                     std::size_t pred_count,
                                     std::size_t gt_count) {
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.iou != b.iou) return a.iou > b.iou;
              if (a.pred != b.pred) return a.pred < b.pred;
              return a.gt < b.gt;
            });
  std::vector<bool> pred_used(pred_count, false);
  std::vector<bool> gt_used(gt_count, false);
  std::vector<Candidate> accepted;
  for (const auto& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = true;
    gt_used[c.gt] = true;
    accepted.push_back(c);
  }
  return accepted;
}

std::vector<std::string> normalized_names(const std::vector<ObjectNode>& xs) {
  std::vector<std::string> names;
  names.reserve(xs.size());
  for (const auto& x : xs) names.push_back(normalize_label(x.name));
  return names;
}

std::vector<std::string> normalized_names(const std::vector<PartNode>& xs) {
  std::vector<std::string> names;
  names.reserve(xs.size());
  for (const auto& x : xs) names.push_back(normalize_label(x.name));
  return names;
}

void check_tau(double tau) {
  if (!(tau > 0.0) || tau > 1.0) {
    throw std::invalid_argument("iou threshold must be in (0, 1], got " +
                                std::to_string(tau));
  }
}

}  // namespace

ObjectMatching match_objects(const SceneRecord& pred, const SceneRecord& gt,
                             double tau) {
  check_tau(tau);
  const auto pred_names = normalized_names(pred.objects);
  const auto gt_names = normalized_names(gt.objects);

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < pred.objects.size(); ++i) {
    for (std::size_t j = 0; j < gt.objects.size(); ++j) {
      if (pred_names[i] != gt_names[j]) continue;
      const double overlap = iou(pred.objects[i].bbox, gt.objects[j].bbox);
      if (overlap >= tau) candidates.push_back({i, j, overlap});
    }
  }

  ObjectMatching result;
  for (const auto& c :
       greedy_assign(std::move(candidates), pred.objects.size(), gt.objects.size())) {
    result.pairs.push_back({c.pred, c.gt, c.iou});
  }
  result.counts.tp = static_cast<std::int64_t>(result.pairs.size());
  result.counts.fp = static_cast<std::int64_t>(pred.objects.size()) - result.counts.tp;
  result.counts.fn = static_cast<std::int64_t>(gt.objects.size()) - result.counts.tp;
  return result;
}

PartMatching match_parts(const ObjectMatching& objects, const SceneRecord& pred,
                         const SceneRecord& gt, double tau) {
  check_tau(tau);
  PartMatching result;
  for (const auto& op : objects.pairs) {
    const auto& pred_parts = pred.objects[op.pred].parts;
    const auto& gt_parts = gt.objects[op.gt].parts;
    const auto pred_names = normalized_names(pred_parts);
    const auto gt_names = normalized_names(gt_parts);

    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < pred_parts.size(); ++i) {
      for (std::size_t j = 0; j < gt_parts.size(); ++j) {
        if (pred_names[i] != gt_names[j]) continue;
        const double overlap = iou(pred_parts[i].bbox, gt_parts[j].bbox);
        if (overlap >= tau) candidates.push_back({i, j, overlap});
      }
    }
    for (const auto& c :
         greedy_assign(std::move(candidates), pred_parts.size(), gt_parts.size())) {
      result.pairs.push_back({op.pred, op.gt, c.pred, c.gt, c.iou});
    }
  }

  // Parts that never became a true-positive chain count against their side:
  // unmatched parts under matched objects, and all parts under unmatched ones.
  result.counts.tp = static_cast<std::int64_t>(result.pairs.size());
  result.counts.fp = static_cast<std::int64_t>(count_parts(pred)) - result.counts.tp;
  result.counts.fn = static_cast<std::int64_t>(count_parts(gt)) - result.counts.tp;
  return result;
}

AffordanceMatching match_affordances(const PartMatching& parts,
                                     const SceneRecord& pred,
                                     const SceneRecord& gt) {
  AffordanceMatching result;
  for (const auto& pp : parts.pairs) {
    const auto& pred_part = pred.objects[pp.pred_object].parts[pp.pred_part];
    const auto& gt_part = gt.objects[pp.gt_object].parts[pp.gt_part];

    std::vector<bool> pred_used(pred_part.affordances.size(), false);
    std::vector<bool> gt_used(gt_part.affordances.size(), false);
    for (std::size_t k = 0; k < pred_part.affordances.size(); ++k) {
      const auto& pa = pred_part.affordances[k];
      const std::string action = normalize_label(pa.action);
      for (std::size_t l = 0; l < gt_part.affordances.size(); ++l) {
        if (gt_used[l]) continue;
        const auto& ga = gt_part.affordances[l];
        if (action != normalize_label(ga.action)) continue;
        const BBox& region = ga.affordance_box ? *ga.affordance_box : gt_part.bbox;
        if (!point_in_box(pa.point, region)) continue;
        pred_used[k] = true;
        gt_used[l] = true;
        result.pairs.push_back(
            {pp.pred_object, pp.gt_object, pp.pred_part, pp.gt_part, k, l});
        break;
      }
    }
  }

  result.counts.tp = static_cast<std::int64_t>(result.pairs.size());
  result.counts.fp =
      static_cast<std::int64_t>(count_affordances(pred)) - result.counts.tp;
  result.counts.fn =
      static_cast<std::int64_t>(count_affordances(gt)) - result.counts.tp;
  return result;
}

ParseRateCounts parse_rate(const SceneRecord& pred, const SceneRecord& gt) {
  const ObjectMatching matching = match_objects(pred, gt, kParseRateIou);
  std::vector<std::ptrdiff_t> matched_pred(gt.objects.size(), -1);
  for (const auto& pair : matching.pairs) {
    matched_pred[pair.gt] = static_cast<std::ptrdiff_t>(pair.pred);
  }

  ParseRateCounts counts;
  for (std::size_t j = 0; j < gt.objects.size(); ++j) {
    const ExpansionPattern pattern = eligibility(gt.objects[j]);
    if (pattern == ExpansionPattern::kNone) continue;
    ++counts.eligible;
    if (matched_pred[j] < 0) continue;
    const ObjectNode& p = pred.objects[static_cast<std::size_t>(matched_pred[j])];
    if (pattern_requires_parts(pattern) && p.parts.empty()) continue;
    if (pattern_requires_affordances(pattern) && count_affordances(p) == 0) continue;
    ++counts.complete;
  }
  return counts;
}

}  // namespace scenetree
