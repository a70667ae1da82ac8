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

#include "scenetree/curriculum.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scenetree {

using nlohmann::json;

SceneRecord pseudo_complete(const SceneRecord& r) {
  SceneRecord out = r;
  for (auto& object : out.objects) {
    if (object.parts.empty()) {
      object.parts.push_back({std::string(kPlaceholderPart), object.bbox, {}});
    }
    for (auto& part : object.parts) {
      if (part.affordances.empty()) {
        part.affordances.push_back(
            {std::string(kPlaceholderAction), box_center(part.bbox), {}});
      }
    }
  }
  return out;
}

std::vector<CurriculumStage> default_stages() {
  return {
      {1, 0.0, 3, {2e-5, 2e-6}},
      {2, 0.3, 4, {1e-5, 1e-6}},
      {3, 0.5, 3, {6e-6, 6e-7}},
  };
}

std::vector<CurriculumStage> load_stages(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("stages") || !doc["stages"].is_array()) {
    throw std::runtime_error(path.string() + ": expected {\"stages\": [...]}");
  }
  std::vector<CurriculumStage> stages;
  for (const auto& js : doc["stages"]) {
    CurriculumStage stage;
    if (!js.is_object() || !js.contains("stage") || !js.contains("pseudo_fraction") ||
        !js.contains("epochs")) {
      throw std::runtime_error(path.string() +
                               ": stage needs {stage, pseudo_fraction, epochs}");
    }
    stage.stage_id = js["stage"].get<int>();
    stage.pseudo_fraction = js["pseudo_fraction"].get<double>();
    stage.epochs = js["epochs"].get<int>();
    stage.metadata.main_lr = js.value("main_lr", 0.0);
    stage.metadata.vision_lr = js.value("vision_lr", 0.0);
    if (stage.pseudo_fraction < 0.0 || stage.pseudo_fraction > 1.0) {
      throw std::runtime_error(path.string() + ": pseudo_fraction outside [0,1]");
    }
    if (stage.epochs < 1) {
      throw std::runtime_error(path.string() + ": epochs must be >= 1");
    }
    stages.push_back(stage);
  }
  if (stages.empty()) throw std::runtime_error(path.string() + ": no stages");
  return stages;
}

namespace {

// splitmix64 finalizer; stable across platforms, unlike the standard
// library's distributions.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct KeyedRng {
  std::uint64_t state;

  explicit KeyedRng(std::initializer_list<std::uint64_t> key) : state(0) {
    for (std::uint64_t k : key) state = mix64(state ^ k);
  }
  std::uint64_t next() { return state = mix64(state); }
  std::size_t below(std::size_t bound) {
    return static_cast<std::size_t>(next() % bound);
  }
};

void fisher_yates(std::vector<std::size_t>& order, KeyedRng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
}

constexpr std::uint64_t kPoolNonPseudo = 0x6e6f6e7073ULL;  // "nonps"
constexpr std::uint64_t kPoolPseudo = 0x707365756dULL;     // "pseum"
constexpr std::uint64_t kPoolMix = 0x6d6978ULL;            // "mix"

// Draws `count` ids without replacement, reshuffling on each wrap.
std::vector<std::string> draw_pool(std::span<const std::string> pool,
                                   std::size_t count, std::uint64_t seed,
                                   int stage_id, int epoch, std::uint64_t tag) {
  std::vector<std::string> out;
  out.reserve(count);
  std::uint64_t wrap = 0;
  while (out.size() < count) {
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    KeyedRng rng{seed, static_cast<std::uint64_t>(stage_id),
                 static_cast<std::uint64_t>(epoch), tag, wrap};
    fisher_yates(order, rng);
    for (std::size_t i = 0; i < order.size() && out.size() < count; ++i) {
      out.push_back(pool[order[i]]);
    }
    ++wrap;
  }
  return out;
}

}  // namespace

SampleManifest sample_epoch(std::span<const std::string> nonpseudo_ids,
                            std::span<const std::string> pseudo_ids,
                            const CurriculumStage& stage, int epoch,
                            std::uint64_t seed, std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample_epoch: n must be >= 1");
  if (stage.pseudo_fraction < 0.0 || stage.pseudo_fraction > 1.0) {
    throw std::invalid_argument("sample_epoch: pseudo_fraction outside [0,1]");
  }
  const auto k_pseudo = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * stage.pseudo_fraction + 0.5));
  const std::size_t k_nonpseudo = n - k_pseudo;
  if (k_pseudo > 0 && pseudo_ids.empty()) {
    throw std::invalid_argument("sample_epoch: pseudo pool is empty");
  }
  if (k_nonpseudo > 0 && nonpseudo_ids.empty()) {
    throw std::invalid_argument("sample_epoch: nonpseudo pool is empty");
  }

  SampleManifest manifest;
  manifest.stage_id = stage.stage_id;
  manifest.epoch = epoch;
  manifest.seed = seed;
  for (auto& id : draw_pool(nonpseudo_ids, k_nonpseudo, seed, stage.stage_id,
                            epoch, kPoolNonPseudo)) {
    manifest.entries.push_back({std::move(id), false});
  }
  for (auto& id :
       draw_pool(pseudo_ids, k_pseudo, seed, stage.stage_id, epoch, kPoolPseudo)) {
    manifest.entries.push_back({std::move(id), true});
  }

  std::vector<std::size_t> order(manifest.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  KeyedRng rng{seed, static_cast<std::uint64_t>(stage.stage_id),
               static_cast<std::uint64_t>(epoch), kPoolMix};
  fisher_yates(order, rng);
  std::vector<ManifestEntry> mixed;
  mixed.reserve(order.size());
  for (std::size_t i : order) mixed.push_back(std::move(manifest.entries[i]));
  manifest.entries = std::move(mixed);
  return manifest;
}

nlohmann::ordered_json manifest_to_json(const SampleManifest& m) {
  nlohmann::ordered_json doc;
  doc["stage"] = m.stage_id;
  doc["epoch"] = m.epoch;
  doc["seed"] = m.seed;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : m.entries) {
    doc["entries"].push_back({{"id", e.id}, {"pool", e.pseudo ? "pseudo" : "nonpseudo"}});
  }
  return doc;
}

void write_manifest_jsonl(std::span<const SampleManifest> manifests,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& m : manifests) {
    out << manifest_to_json(m).dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace scenetree
