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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scenetree/scene.hpp"

namespace scenetree {

inline constexpr int kCoordBins = 1000;

// Relative-coordinate quantization into [0, 999]. bin = floor(v/extent*1000),
// clamped into range so v >= extent maps to 999. Throws std::invalid_argument
// when extent <= 0.
int quantize(double v, double extent);

// "<12><34>" <-> {12, 34}. Decoding returns nullopt on malformed input or an
// out-of-range bin; encoding is unpadded decimal.
std::optional<std::vector<int>> decode_coord_tokens(std::string_view s);
std::string encode_coord_tokens(std::span<const int> bins);

// Bin-center dequantization: (bin + 0.5) / 1000 * extent. The center stays
// inside its own bin, so quantize(dequantize(b, W), W) == b for every bin.
double dequantize(int bin, double extent);

// Serialized hierarchy text: a JSON document whose boxes and points are
// coordinate-token strings.
//
//   {"objects": [{"name": ..., "bbox": "<x1><y1><x2><y2>", "parts":
//     [{"part_name": ..., "bbox": "<...>", "affordances":
//       [{"action": ..., "point": "<x><y>"}]}]}]}
//
// Tokens are unpadded decimal bins. x coordinates quantize against the record
// width, y coordinates against the height. Placeholder entries serialize
// verbatim. Throws std::invalid_argument on invalid dimensions or unordered
// boxes.
std::string serialize_hierarchy(const SceneRecord& r);

enum class ParseMode { kStrict, kTolerant };

struct ParseIssue {
  // Byte offset into the input when known, -1 otherwise (the path inside the
  // document is carried in the message).
  std::ptrdiff_t offset = -1;
  std::string code;
  std::string message;
};

struct ParseDiagnostics {
  bool recovered = false;
  std::vector<ParseIssue> issues;
};

// Thrown by strict-mode parsing on the first deviation from the format.
class SerializedParseError : public std::runtime_error {
 public:
  SerializedParseError(const std::string& what, std::ptrdiff_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::ptrdiff_t offset() const { return offset_; }

 private:
  std::ptrdiff_t offset_;
};

// Parses serialized hierarchy text back into a record with coordinates at bin
// centers. Strict mode throws SerializedParseError on any schema deviation.
// Tolerant mode never throws on content: malformed objects/parts/affordances
// are skipped with one issue each and well-formed siblings are kept;
// diagnostics.recovered is false only when no document could be extracted.
std::pair<SceneRecord, ParseDiagnostics> parse_serialized(
    std::string_view text, int width, int height,
    ParseMode mode = ParseMode::kTolerant);

// Dataset JSON schema (plain continuous pixel numbers, no tokens):
//   {"image_id": str, "width": int, "height": int,
//    "target_category": str|null,
//    "objects": [{"name": str, "bbox": [f,f,f,f], "parts":
//      [{"part_name": str, "bbox": [f,f,f,f], "affordances":
//        [{"action": str, "point": [f,f],
//          "affordance_bbox": [f,f,f,f]|null}]}]}]}
// Optional keys (target_category, affordance_bbox) are omitted when absent.
nlohmann::ordered_json scene_to_json(const SceneRecord& r);

// Throws std::runtime_error on schema violations (missing/ill-typed fields,
// unordered or non-finite boxes, empty labels, non-positive dimensions).
SceneRecord scene_from_json(const nlohmann::json& j);

enum class LinePolicy { kAbort, kSkip };

struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct JsonlReadResult {
  std::vector<SceneRecord> records;
  std::vector<LineIssue> skipped;
};

// One record per line. kAbort throws std::runtime_error naming the first bad
// line; kSkip collects bad lines in `skipped` and keeps going.
JsonlReadResult read_scene_jsonl(const std::filesystem::path& path,
                                 LinePolicy policy = LinePolicy::kAbort);

void write_scene_jsonl(std::span<const SceneRecord> records,
                       const std::filesystem::path& path);

}  // namespace scenetree
