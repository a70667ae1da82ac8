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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "scenetree/serialization.hpp"
#include "support/scene_generators.hpp"

using namespace scenetree;
namespace fs = std::filesystem;

namespace {

// Two objects / three parts / three affordances: microwave with door (open)
// and button panel (press), drawer with handle (pull).
const char* kKitchenSceneText = R"({
  "objects": [{
    "name": "microwave",
    "bbox": "<100><100><499><499>",
    "parts": [{
      "part_name": "door",
      "bbox": "<120><140><300><480>",
      "affordances": [
        {"action": "open", "point": "<200><300>"}
      ]
    }, {
      "part_name": "button panel",
      "bbox": "<320><150><480><470>",
      "affordances": [
        {"action": "press", "point": "<400><320>"}
      ]
    }]
  }, {
    "name": "drawer",
    "bbox": "<550><600><900><820>",
    "parts": [{
      "part_name": "handle",
      "bbox": "<650><680><800><720>",
      "affordances": [
        {"action": "pull", "point": "<720><700>"}
      ]
    }]
  }]
})";

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "scenetree_ser_tests";
  fs::create_directories(dir);
  return dir / name;
}

bool same_structure(const SceneRecord& a, const SceneRecord& b) {
  if (a.objects.size() != b.objects.size()) return false;
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    const auto& oa = a.objects[i];
    const auto& ob = b.objects[i];
    if (oa.name != ob.name || oa.parts.size() != ob.parts.size()) return false;
    for (std::size_t j = 0; j < oa.parts.size(); ++j) {
      const auto& pa = oa.parts[j];
      const auto& pb = ob.parts[j];
      if (pa.name != pb.name || pa.affordances.size() != pb.affordances.size()) {
        return false;
      }
      for (std::size_t k = 0; k < pa.affordances.size(); ++k) {
        if (pa.affordances[k].action != pb.affordances[k].action) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("quantize formula and clamping") {
  CHECK(quantize(0.0, 1000.0) == 0);
  CHECK(quantize(999.9, 1000.0) == 999);
  CHECK(quantize(500.0, 1000.0) == 500);
  CHECK(quantize(1000.0, 1000.0) == 999);   // v >= extent clamps
  CHECK(quantize(5000.0, 1000.0) == 999);
  CHECK(quantize(0.0, 1.0) == 0);
  CHECK(quantize(0.9999, 1.0) == 999);
  CHECK_THROWS_AS(quantize(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantize(1.0, -5.0), std::invalid_argument);
}

TEST_CASE("dequantize lands on bin centers") {
  CHECK(dequantize(0, 1000.0) == doctest::Approx(0.5));
  CHECK(dequantize(999, 1000.0) == doctest::Approx(999.5));
  CHECK(dequantize(500, 1000.0) == doctest::Approx(500.5));
}

TEST_CASE("quantize/dequantize round-trips every bin at multiple extents") {
  for (double extent : {1.0, 640.0, 1000.0, 4032.0}) {
    for (int bin = 0; bin < kCoordBins; ++bin) {
      CHECK(quantize(dequantize(bin, extent), extent) == bin);
    }
  }
}

TEST_CASE("quantization error bound") {
  std::mt19937_64 rng(3);
  for (double extent : {1.0, 640.0, 1000.0, 4032.0}) {
    for (int i = 0; i < 2000; ++i) {
      const double v = testgen::uniform(rng, 0.0, std::nextafter(extent, 0.0));
      const double back = dequantize(quantize(v, extent), extent);
      CHECK(std::abs(back - v) <= extent / 2000.0 + 1e-9);
    }
  }
}

TEST_CASE("coord token encode/decode") {
  const int bins[3] = {0, 42, 999};
  CHECK(encode_coord_tokens(bins) == "<0><42><999>");
  auto decoded = decode_coord_tokens("<0><42><999>");
  REQUIRE(decoded.has_value());
  CHECK(*decoded == std::vector<int>{0, 42, 999});
  CHECK_FALSE(decode_coord_tokens("").has_value());
  CHECK_FALSE(decode_coord_tokens("<1000>").has_value());
  CHECK_FALSE(decode_coord_tokens("<12>x<13>").has_value());
  CHECK_FALSE(decode_coord_tokens("<>").has_value());
  CHECK_FALSE(decode_coord_tokens("<-3>").has_value());
}

TEST_CASE("serialize_hierarchy emits the token structure with stable key order") {
  SceneRecord r;
  r.image_id = "one";
  r.width = 1000;
  r.height = 1000;
  ObjectNode o{"cup", {0, 0, 1000, 1000}, {}};
  r.objects.push_back(o);
  const std::string text = serialize_hierarchy(r);
  CHECK(text.find("\"bbox\":\"<0><0><999><999>\"") != std::string::npos);
  // Key order follows the target format: name before bbox before parts.
  CHECK(text.find("\"name\"") < text.find("\"bbox\""));
  CHECK(text.find("\"bbox\"") < text.find("\"parts\""));
}

TEST_CASE("serialize_hierarchy of an empty record") {
  SceneRecord r;
  r.width = 640;
  r.height = 480;
  const auto doc = nlohmann::json::parse(serialize_hierarchy(r));
  CHECK(doc == nlohmann::json::parse(R"({"objects": []})"));
}

TEST_CASE("parse_serialized reads the kitchen fixture") {
  auto [record, diag] = parse_serialized(kKitchenSceneText, 1000, 1000);
  CHECK(diag.recovered);
  CHECK(diag.issues.empty());
  REQUIRE(record.objects.size() == 2);
  CHECK(record.objects[0].name == "microwave");
  CHECK(record.objects[0].parts.size() == 2);
  CHECK(record.objects[1].parts.size() == 1);
  CHECK(count_parts(record) == 3);
  CHECK(count_affordances(record) == 3);
  CHECK(record.objects[1].parts[0].affordances[0].action == "pull");
  // Token <720> at width 1000 decodes to the bin center 720.5.
  CHECK(record.objects[1].parts[0].affordances[0].point.x == doctest::Approx(720.5));
}

TEST_CASE("serialize -> parse round-trip puts coordinates at bin centers") {
  std::mt19937_64 rng(21);
  testgen::GenConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const SceneRecord r = testgen::random_gt(rng, cfg, "rt_" + std::to_string(i));
    auto [parsed, diag] = parse_serialized(serialize_hierarchy(r), r.width,
                                           r.height, ParseMode::kStrict);
    CHECK(diag.recovered);
    CHECK(diag.issues.empty());
    REQUIRE(same_structure(r, parsed));
    for (std::size_t oi = 0; oi < r.objects.size(); ++oi) {
      const double expect =
          dequantize(quantize(r.objects[oi].bbox.x1, r.width), r.width);
      CHECK(parsed.objects[oi].bbox.x1 == doctest::Approx(expect));
    }
  }
}

TEST_CASE("tolerant parse skips a malformed object and keeps siblings") {
  const std::string text = R"({"objects": [
    {"name": "cup", "parts": []},
    {"name": "drawer", "bbox": "<1><2><3><4>", "parts": []}
  ]})";
  auto [record, diag] = parse_serialized(text, 100, 100);
  CHECK(diag.recovered);
  REQUIRE(record.objects.size() == 1);
  CHECK(record.objects[0].name == "drawer");
  CHECK(diag.issues.size() == 1);
  CHECK(diag.issues[0].code == "MISSING_KEY");
}

TEST_CASE("tolerant parse skips malformed parts and affordances independently") {
  const std::string text = R"({"objects": [{
    "name": "microwave", "bbox": "<0><0><500><500>",
    "parts": [
      {"part_name": "door", "bbox": "<0><0><100><100>",
       "affordances": [{"action": "open", "point": "<oops>"},
                        {"action": "press", "point": "<5><5>"}]},
      {"part_name": "panel", "bbox": "<bad tokens>", "affordances": []}
    ]}]})";
  auto [record, diag] = parse_serialized(text, 1000, 1000);
  CHECK(diag.recovered);
  REQUIRE(record.objects.size() == 1);
  REQUIRE(record.objects[0].parts.size() == 1);
  CHECK(record.objects[0].parts[0].affordances.size() == 1);
  CHECK(record.objects[0].parts[0].affordances[0].action == "press");
  CHECK(diag.issues.size() == 2);
}

TEST_CASE("tolerant parse of non-JSON input reports no recovery") {
  auto [record, diag] = parse_serialized("here is a scene I found", 100, 100);
  CHECK_FALSE(diag.recovered);
  CHECK(record.objects.empty());
  REQUIRE_FALSE(diag.issues.empty());
  CHECK(diag.issues[0].code == "BAD_JSON");
}

TEST_CASE("empty objects document recovers to an empty record") {
  auto [record, diag] = parse_serialized(R"({"objects": []})", 640, 480);
  CHECK(diag.recovered);
  CHECK(diag.issues.empty());
  CHECK(record.objects.empty());
}

TEST_CASE("strict parse aborts on deviations") {
  CHECK_THROWS_AS(parse_serialized("not json", 100, 100, ParseMode::kStrict),
                  SerializedParseError);
  CHECK_THROWS_AS(
      parse_serialized(R"({"objects": [{"name": "cup", "parts": []}]})", 100,
                       100, ParseMode::kStrict),
      SerializedParseError);
  // Extra keys are deviations in strict mode.
  CHECK_THROWS_AS(
      parse_serialized(
          R"({"objects": [{"name": "cup", "bbox": "<1><1><2><2>", "parts": [], "score": 0.9}]})",
          100, 100, ParseMode::kStrict),
      SerializedParseError);
}

TEST_CASE("records produced by the serializer round-trip validate cleanly") {
  std::mt19937_64 rng(29);
  testgen::GenConfig cfg;
  for (int i = 0; i < 30; ++i) {
    const SceneRecord r = testgen::random_gt(rng, cfg, "v_" + std::to_string(i));
    auto [parsed, diag] =
        parse_serialized(serialize_hierarchy(r), r.width, r.height);
    CHECK(validate_scene(parsed).ok());
    CHECK(validate_scene(scene_from_json(scene_to_json(r))).ok());
  }
}

TEST_CASE("tolerant parsing of strict-valid text produces zero issues") {
  std::mt19937_64 rng(33);
  testgen::GenConfig cfg;
  for (int i = 0; i < 50; ++i) {
    const SceneRecord r = testgen::random_gt(rng, cfg, "ok_" + std::to_string(i));
    auto [parsed, diag] =
        parse_serialized(serialize_hierarchy(r), r.width, r.height);
    CHECK(diag.recovered);
    CHECK(diag.issues.empty());
  }
}

TEST_CASE("unordered token boxes are rejected per mode") {
  const std::string text =
      R"({"objects": [{"name": "cup", "bbox": "<9><9><1><1>", "parts": []}]})";
  auto [record, diag] = parse_serialized(text, 100, 100);
  CHECK(diag.recovered);
  CHECK(record.objects.empty());
  REQUIRE(diag.issues.size() == 1);
  CHECK(diag.issues[0].code == "BOX_ORDER");
  CHECK_THROWS_AS(parse_serialized(text, 100, 100, ParseMode::kStrict),
                  SerializedParseError);
}

TEST_CASE("placeholders serialize verbatim and survive the round trip") {
  SceneRecord r;
  r.image_id = "ph";
  r.width = 500;
  r.height = 500;
  ObjectNode o{"cabinet", {10, 10, 400, 400}, {}};
  o.parts.push_back({std::string(kPlaceholderPart),
                     o.bbox,
                     {Affordance{std::string(kPlaceholderAction), {205, 205}, {}}}});
  r.objects.push_back(o);
  const std::string text = serialize_hierarchy(r);
  CHECK(text.find("__placeholder_part__") != std::string::npos);
  auto [parsed, diag] = parse_serialized(text, 500, 500, ParseMode::kStrict);
  REQUIRE(parsed.objects.size() == 1);
  CHECK(parsed.objects[0].parts[0].is_placeholder());
  CHECK(parsed.objects[0].parts[0].affordances[0].is_placeholder());
}

TEST_CASE("dataset json round trip") {
  SceneRecord r;
  r.image_id = "img_7";
  r.width = 640;
  r.height = 480;
  r.target_category = "Microwave";
  ObjectNode o{"Microwave", {10.5, 20.25, 600, 450}, {}};
  PartNode p{"door", {15, 30, 300, 440}, {}};
  p.affordances.push_back({"open", {100, 200}, BBox{50, 60, 250, 400}});
  p.affordances.push_back({"press", {120, 220}, {}});  // no affordance box
  o.parts.push_back(p);
  r.objects.push_back(o);

  const SceneRecord back = scene_from_json(scene_to_json(r));
  CHECK(back.image_id == r.image_id);
  CHECK(back.width == r.width);
  REQUIRE(back.target_category.has_value());
  CHECK(*back.target_category == "Microwave");
  REQUIRE(back.objects.size() == 1);
  CHECK(back.objects[0].bbox == r.objects[0].bbox);
  REQUIRE(back.objects[0].parts.size() == 1);
  REQUIRE(back.objects[0].parts[0].affordances.size() == 2);
  CHECK(back.objects[0].parts[0].affordances[0].affordance_box ==
        r.objects[0].parts[0].affordances[0].affordance_box);
  CHECK_FALSE(back.objects[0].parts[0].affordances[1].affordance_box.has_value());
}

TEST_CASE("scene_from_json rejects schema violations") {
  using nlohmann::json;
  CHECK_THROWS(scene_from_json(json::parse(R"({"width": 10})")));
  CHECK_THROWS(scene_from_json(json::parse(
      R"({"image_id": "a", "width": 0, "height": 5, "objects": []})")));
  CHECK_THROWS(scene_from_json(json::parse(
      R"({"image_id": "a", "width": 10, "height": 5,
          "objects": [{"name": "cup", "bbox": [5, 5, 1, 1], "parts": []}]})")));
  CHECK_THROWS(scene_from_json(json::parse(
      R"({"image_id": "a", "width": 10, "height": 5,
          "objects": [{"name": " ", "bbox": [0, 0, 1, 1], "parts": []}]})")));
}

TEST_CASE("jsonl write/read identity and line policies") {
  std::mt19937_64 rng(5);
  testgen::GenConfig cfg;
  std::vector<SceneRecord> records;
  for (int i = 0; i < 5; ++i) {
    records.push_back(testgen::random_gt(rng, cfg, "jl_" + std::to_string(i)));
  }
  const fs::path path = temp_file("roundtrip.jsonl");
  write_scene_jsonl(records, path);

  const JsonlReadResult back = read_scene_jsonl(path);
  REQUIRE(back.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back.records[i].image_id == records[i].image_id);
    CHECK(scene_to_json(back.records[i]) == scene_to_json(records[i]));
  }

  SUBCASE("skip policy keeps good lines and reports bad ones") {
    std::ofstream out(path, std::ios::app);
    out << "{\"broken\": \n";
    out.close();
    const JsonlReadResult tolerant = read_scene_jsonl(path, LinePolicy::kSkip);
    CHECK(tolerant.records.size() == records.size());
    REQUIRE(tolerant.skipped.size() == 1);
    CHECK(tolerant.skipped[0].line == records.size() + 1);
    CHECK_THROWS_AS(read_scene_jsonl(path, LinePolicy::kAbort), std::runtime_error);
  }

  SUBCASE("empty file reads as an empty stream") {
    const fs::path empty = temp_file("empty.jsonl");
    std::ofstream(empty).close();
    const JsonlReadResult none = read_scene_jsonl(empty);
    CHECK(none.records.empty());
    CHECK(none.skipped.empty());
  }
}
