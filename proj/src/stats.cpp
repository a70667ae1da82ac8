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

#include "scenetree/stats.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

namespace scenetree {

namespace {

void note_variant(std::map<std::string, std::set<std::string>>& variants,
                  const std::string& normalized, const std::string& raw) {
  variants[normalized].insert(raw);
}

std::map<std::string, std::vector<std::string>> collapse_variants(
    const std::map<std::string, std::set<std::string>>& variants) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [name, raws] : variants) {
    if (raws.size() > 1) out[name] = {raws.begin(), raws.end()};
  }
  return out;
}

}  // namespace

StatsReport corpus_stats(std::span<const SceneRecord> records, std::size_t top_k) {
  StatsReport report;
  std::map<std::string, std::set<std::string>> object_raw, part_raw, action_raw;
  std::map<std::tuple<std::string, std::string, std::string>, std::int64_t> compositions;

  for (const auto& raw : records) {
    const SceneRecord record = strip_placeholders(raw);
    ++report.image_count;
    for (const auto& object : record.objects) {
      ++report.object_count;
      const std::string object_name = normalize_label(object.name);
      note_variant(object_raw, object_name, object.name);
      switch (eligibility(object)) {
        case ExpansionPattern::kNone: ++report.pattern_none; break;
        case ExpansionPattern::kPartsOnly: ++report.pattern_parts_only; break;
        case ExpansionPattern::kAffordancesOnly: ++report.pattern_affordances_only; break;
        case ExpansionPattern::kBoth: ++report.pattern_both; break;
      }
      for (const auto& part : object.parts) {
        ++report.part_count;
        const std::string part_name = normalize_label(part.name);
        note_variant(part_raw, part_name, part.name);
        for (const auto& aff : part.affordances) {
          ++report.affordance_count;
          ++report.chain_count;
          const std::string action = normalize_label(aff.action);
          note_variant(action_raw, action, aff.action);
          ++compositions[{object_name, part_name, action}];
        }
      }
    }
  }

  report.object_categories = static_cast<std::int64_t>(object_raw.size());
  report.part_categories = static_cast<std::int64_t>(part_raw.size());
  report.action_categories = static_cast<std::int64_t>(action_raw.size());
  if (report.object_count > 0) {
    report.mean_parts_per_object =
        static_cast<double>(report.part_count) / static_cast<double>(report.object_count);
  }
  if (report.part_count > 0) {
    report.mean_affordances_per_part = static_cast<double>(report.affordance_count) /
                                       static_cast<double>(report.part_count);
  }

  std::vector<Composition> all;
  all.reserve(compositions.size());
  for (const auto& [key, count] : compositions) {
    all.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    report.composition_total += count;
  }
  std::sort(all.begin(), all.end(), [](const Composition& a, const Composition& b) {
    if (a.count != b.count) return a.count > b.count;
    return std::tie(a.object, a.part, a.action) < std::tie(b.object, b.part, b.action);
  });
  if (all.size() > top_k) all.resize(top_k);
  report.top_compositions = std::move(all);

  report.object_variants = collapse_variants(object_raw);
  report.part_variants = collapse_variants(part_raw);
  report.action_variants = collapse_variants(action_raw);
  return report;
}

nlohmann::ordered_json stats_to_json(const StatsReport& report) {
  nlohmann::ordered_json doc;
  doc["image_count"] = report.image_count;
  doc["object_count"] = report.object_count;
  doc["part_count"] = report.part_count;
  doc["affordance_count"] = report.affordance_count;
  doc["chain_count"] = report.chain_count;
  doc["object_categories"] = report.object_categories;
  doc["part_categories"] = report.part_categories;
  doc["action_categories"] = report.action_categories;
  doc["mean_parts_per_object"] = report.mean_parts_per_object;
  doc["mean_affordances_per_part"] = report.mean_affordances_per_part;
  doc["top_compositions"] = nlohmann::ordered_json::array();
  for (const auto& c : report.top_compositions) {
    doc["top_compositions"].push_back({{"object", c.object},
                                       {"part", c.part},
                                       {"action", c.action},
                                       {"count", c.count}});
  }
  doc["composition_total"] = report.composition_total;
  doc["expansion_patterns"] = {{"none", report.pattern_none},
                               {"parts_only", report.pattern_parts_only},
                               {"affordances_only", report.pattern_affordances_only},
                               {"both", report.pattern_both}};
  auto variants = [](const std::map<std::string, std::vector<std::string>>& m) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [name, raws] : m) {
      arr.push_back({{"name", name}, {"variants", raws}});
    }
    return arr;
  };
  doc["vocabulary_variants"] = {{"objects", variants(report.object_variants)},
                                {"parts", variants(report.part_variants)},
                                {"actions", variants(report.action_variants)}};
  return doc;
}

std::string format_stats_table(const StatsReport& report) {
  std::ostringstream out;
  out << "images                    " << report.image_count << '\n';
  out << "objects                   " << report.object_count << '\n';
  out << "parts                     " << report.part_count << '\n';
  out << "affordances               " << report.affordance_count << '\n';
  out << "chains                    " << report.chain_count << '\n';
  out << "object categories         " << report.object_categories << '\n';
  out << "part categories           " << report.part_categories << '\n';
  out << "action categories         " << report.action_categories << '\n';
  out << std::fixed << std::setprecision(3);
  out << "mean parts / object       " << report.mean_parts_per_object << '\n';
  out << "mean affordances / part   " << report.mean_affordances_per_part << '\n';
  out << "parse-eligible objects    "
      << report.pattern_parts_only + report.pattern_affordances_only +
             report.pattern_both
      << " (parts_only " << report.pattern_parts_only << ", affordances_only "
      << report.pattern_affordances_only << ", both " << report.pattern_both
      << ")\n";
  out << "top compositions (object | part | action | count)\n";
  for (const auto& c : report.top_compositions) {
    out << "  " << c.object << " | " << c.part << " | " << c.action << " | "
        << c.count << '\n';
  }
  return out.str();
}

}  // namespace scenetree
