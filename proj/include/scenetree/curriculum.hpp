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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scenetree/scene.hpp"

namespace scenetree {

// Completes a record into a full-depth tree: part-less objects gain one
// placeholder part carrying the object box; affordance-less parts (including
// freshly inserted placeholders) gain one placeholder affordance at the part
// box center with no affordance box. Idempotent; existing entries untouched.
SceneRecord pseudo_complete(const SceneRecord& r);

struct StageMetadata {
  double main_lr = 0.0;    // main/multimodal learning rate
  double vision_lr = 0.0;  // vision tower learning rate
};

struct CurriculumStage {
  int stage_id = 1;
  double pseudo_fraction = 0.0;
  int epochs = 1;
  StageMetadata metadata;  // informational pass-through only
};

// Built-in three-stage schedule: fractions {0.0, 0.3, 0.5}, epochs {3, 4, 3}.
std::vector<CurriculumStage> default_stages();

// Stage presets from a JSON config:
//   {"stages": [{"stage": 1, "pseudo_fraction": 0.0, "epochs": 3,
//                "main_lr": 2e-5, "vision_lr": 2e-6}, ...]}
std::vector<CurriculumStage> load_stages(const std::filesystem::path& path);

struct ManifestEntry {
  std::string id;
  bool pseudo = false;
};

struct SampleManifest {
  int stage_id = 1;
  int epoch = 0;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
};

// Deterministic epoch sample of n entries with round-half-up
// k_pseudo = round(n * pseudo_fraction). Each pool is shuffled under a key
// derived from (seed, stage, epoch, pool), drawn without replacement, and
// reshuffled (key extended by the wrap count) when exhausted; the combined
// list is interleaved by one more keyed shuffle. Throws std::invalid_argument
// when n < 1 or a pool required by the fraction is empty.
SampleManifest sample_epoch(std::span<const std::string> nonpseudo_ids,
                            std::span<const std::string> pseudo_ids,
                            const CurriculumStage& stage, int epoch,
                            std::uint64_t seed, std::size_t n);

// Manifest JSONL line: {"stage": int, "epoch": int, "seed": int,
// "entries": [{"id": str, "pool": "pseudo"|"nonpseudo"}]}
nlohmann::ordered_json manifest_to_json(const SampleManifest& m);

void write_manifest_jsonl(std::span<const SampleManifest> manifests,
                          const std::filesystem::path& path);

}  // namespace scenetree
