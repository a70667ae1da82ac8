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

#include "scenetree/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scenetree {

using nlohmann::json;
using nlohmann::ordered_json;

int quantize(double v, double extent) {
  if (!(extent > 0.0)) {
    throw std::invalid_argument("quantize: extent must be positive");
  }
  const double scaled = std::floor(v / extent * kCoordBins);
  if (scaled < 0.0) return 0;
  if (scaled >= kCoordBins) return kCoordBins - 1;
  return static_cast<int>(scaled);
}

double dequantize(int bin, double extent) {
  if (!(extent > 0.0)) {
    throw std::invalid_argument("dequantize: extent must be positive");
  }
  return (bin + 0.5) / kCoordBins * extent;
}

std::optional<std::vector<int>> decode_coord_tokens(std::string_view s) {
  std::vector<int> bins;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') return std::nullopt;
    std::size_t j = s.find('>', i + 1);
    if (j == std::string_view::npos || j == i + 1) return std::nullopt;
    int value = 0;
    for (std::size_t k = i + 1; k < j; ++k) {
      if (s[k] < '0' || s[k] > '9') return std::nullopt;
      value = value * 10 + (s[k] - '0');
      if (value >= 10000) return std::nullopt;
    }
    if (value >= kCoordBins) return std::nullopt;
    bins.push_back(value);
    i = j + 1;
  }
  if (bins.empty()) return std::nullopt;
  return bins;
}

std::string encode_coord_tokens(std::span<const int> bins) {
  std::string out;
  for (int bin : bins) {
    out += "<" + std::to_string(bin) + ">";
  }
  return out;
}

namespace {

std::string box_tokens(const BBox& b, double w, double h) {
  const int bins[4] = {quantize(b.x1, w), quantize(b.y1, h), quantize(b.x2, w),
                       quantize(b.y2, h)};
  return encode_coord_tokens(bins);
}

std::string point_tokens(const Point& p, double w, double h) {
  const int bins[2] = {quantize(p.x, w), quantize(p.y, h)};
  return encode_coord_tokens(bins);
}

}  // namespace

std::string serialize_hierarchy(const SceneRecord& r) {
  if (r.width <= 0 || r.height <= 0) {
    throw std::invalid_argument("serialize_hierarchy: record dimensions not positive");
  }
  const double w = r.width;
  const double h = r.height;

  ordered_json doc;
  doc["objects"] = ordered_json::array();
  for (const auto& object : r.objects) {
    if (!box_ordered(object.bbox)) {
      throw std::invalid_argument("serialize_hierarchy: unordered object box");
    }
    ordered_json jo;
    jo["name"] = object.name;
    jo["bbox"] = box_tokens(object.bbox, w, h);
    jo["parts"] = ordered_json::array();
    for (const auto& part : object.parts) {
      if (!box_ordered(part.bbox)) {
        throw std::invalid_argument("serialize_hierarchy: unordered part box");
      }
      ordered_json jp;
      jp["part_name"] = part.name;
      jp["bbox"] = box_tokens(part.bbox, w, h);
      jp["affordances"] = ordered_json::array();
      for (const auto& aff : part.affordances) {
        ordered_json ja;
        ja["action"] = aff.action;
        ja["point"] = point_tokens(aff.point, w, h);
        jp["affordances"].push_back(std::move(ja));
      }
      jo["parts"].push_back(std::move(jp));
    }
    doc["objects"].push_back(std::move(jo));
  }
  return doc.dump();
}

namespace {

// Shared walker for strict and tolerant deserialization of the token format.
class SerializedReader {
 public:
  SerializedReader(int width, int height, ParseMode mode, ParseDiagnostics& diag)
      : width_(width), height_(height), mode_(mode), diag_(diag) {}

  SceneRecord read(std::string_view text) {
    SceneRecord record;
    record.width = width_;
    record.height = height_;

    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      fail("BAD_JSON", "input is not valid JSON: " + std::string(e.what()),
           static_cast<std::ptrdiff_t>(e.byte));
      return record;
    }
    if (!doc.is_object()) {
      fail("BAD_ROOT", "top level is not a JSON object");
      return record;
    }
    check_keys(doc, {"objects"}, "$");
    if (!doc.contains("objects") || !doc["objects"].is_array()) {
      fail("BAD_ROOT", "missing top-level \"objects\" array");
      return record;
    }

    std::size_t index = 0;
    for (const auto& jo : doc["objects"]) {
      const std::string path = "$.objects[" + std::to_string(index++) + "]";
      ObjectNode object;
      if (read_object(jo, path, object)) {
        record.objects.push_back(std::move(object));
      }
    }
    diag_.recovered = true;
    return record;
  }

 private:
  bool read_object(const json& j, const std::string& path, ObjectNode& out) {
    if (!j.is_object()) return drop(path, "BAD_TYPE", "object entry is not a JSON object");
    check_keys(j, {"name", "bbox", "parts"}, path);
    if (!read_label(j, "name", path, out.name)) return false;
    if (!read_box(j, path, out.bbox)) return false;
    if (!j.contains("parts") || !j["parts"].is_array()) {
      return drop(path, "MISSING_KEY", "missing \"parts\" array");
    }
    std::size_t index = 0;
    for (const auto& jp : j["parts"]) {
      const std::string ppath = path + ".parts[" + std::to_string(index++) + "]";
      PartNode part;
      if (read_part(jp, ppath, part)) out.parts.push_back(std::move(part));
    }
    return true;
  }

  bool read_part(const json& j, const std::string& path, PartNode& out) {
    if (!j.is_object()) return drop(path, "BAD_TYPE", "part entry is not a JSON object");
    check_keys(j, {"part_name", "bbox", "affordances"}, path);
    if (!read_label(j, "part_name", path, out.name)) return false;
    if (!read_box(j, path, out.bbox)) return false;
    if (!j.contains("affordances") || !j["affordances"].is_array()) {
      return drop(path, "MISSING_KEY", "missing \"affordances\" array");
    }
    std::size_t index = 0;
    for (const auto& ja : j["affordances"]) {
      const std::string apath = path + ".affordances[" + std::to_string(index++) + "]";
      Affordance aff;
      if (read_affordance(ja, apath, aff)) out.affordances.push_back(std::move(aff));
    }
    return true;
  }

  bool read_affordance(const json& j, const std::string& path, Affordance& out) {
    if (!j.is_object()) return drop(path, "BAD_TYPE", "affordance entry is not a JSON object");
    check_keys(j, {"action", "point"}, path);
    if (!read_label(j, "action", path, out.action)) return false;
    if (!j.contains("point") || !j["point"].is_string()) {
      return drop(path, "MISSING_KEY", "missing \"point\" token string");
    }
    const auto bins = decode_coord_tokens(j["point"].get_ref<const std::string&>());
    if (!bins || bins->size() != 2) {
      return drop(path + ".point", "BAD_TOKEN", "point must be two coordinate tokens");
    }
    out.point = {dequantize((*bins)[0], width_), dequantize((*bins)[1], height_)};
    return true;
  }

  bool read_label(const json& j, const char* key, const std::string& path,
                  std::string& out) {
    if (!j.contains(key) || !j[key].is_string()) {
      return drop(path, "MISSING_KEY",
                  "missing \"" + std::string(key) + "\" string");
    }
    out = j[key].get<std::string>();
    if (normalize_label(out).empty()) {
      return drop(path + "." + key, "EMPTY_LABEL", "label empty after normalization");
    }
    return true;
  }

  bool read_box(const json& j, const std::string& path, BBox& out) {
    if (!j.contains("bbox") || !j["bbox"].is_string()) {
      return drop(path, "MISSING_KEY", "missing \"bbox\" token string");
    }
    const auto bins = decode_coord_tokens(j["bbox"].get_ref<const std::string&>());
    if (!bins || bins->size() != 4) {
      return drop(path + ".bbox", "BAD_TOKEN", "bbox must be four coordinate tokens");
    }
    if ((*bins)[0] > (*bins)[2] || (*bins)[1] > (*bins)[3]) {
      return drop(path + ".bbox", "BOX_ORDER", "bbox token bins not ordered");
    }
    out = {dequantize((*bins)[0], width_), dequantize((*bins)[1], height_),
           dequantize((*bins)[2], width_), dequantize((*bins)[3], height_)};
    return true;
  }

  void check_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& path) {
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* k : allowed) {
        if (item.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) {
        if (mode_ == ParseMode::kStrict) {
          throw SerializedParseError(
              "unexpected key \"" + item.key() + "\" at " + path, -1);
        }
        diag_.issues.push_back(
            {-1, "EXTRA_KEY", "ignored key \"" + item.key() + "\" at " + path});
      }
    }
  }

  // Records an issue for a skipped entity; strict mode aborts instead.
  bool drop(const std::string& path, const std::string& code,
            const std::string& message) {
    if (mode_ == ParseMode::kStrict) {
      throw SerializedParseError(message + " at " + path, -1);
    }
    diag_.issues.push_back({-1, code, message + " at " + path});
    return false;
  }

  // Unrecoverable document-level failure.
  void fail(const std::string& code, const std::string& message,
            std::ptrdiff_t offset = -1) {
    if (mode_ == ParseMode::kStrict) {
      throw SerializedParseError(message, offset);
    }
    diag_.issues.push_back({offset, code, message});
    diag_.recovered = false;
  }

  int width_;
  int height_;
  ParseMode mode_;
  ParseDiagnostics& diag_;
};

}  // namespace

std::pair<SceneRecord, ParseDiagnostics> parse_serialized(std::string_view text,
                                                          int width, int height,
                                                          ParseMode mode) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("parse_serialized: dimensions must be positive");
  }
  ParseDiagnostics diag;
  SerializedReader reader(width, height, mode, diag);
  SceneRecord record = reader.read(text);
  if (!diag.recovered) record = SceneRecord{"", width, height, {}, {}};
  return {std::move(record), std::move(diag)};
}

namespace {

json box_to_json(const BBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

BBox box_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) {
    throw std::runtime_error(what + ": bbox must be an array of four numbers");
  }
  BBox b;
  double* coords[4] = {&b.x1, &b.y1, &b.x2, &b.y2};
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_number()) {
      throw std::runtime_error(what + ": bbox entries must be numbers");
    }
    *coords[i] = j[i].get<double>();
  }
  if (!box_finite(b)) throw std::runtime_error(what + ": bbox not finite");
  if (!box_ordered(b)) throw std::runtime_error(what + ": bbox not ordered");
  return b;
}

std::string label_from_json(const json& j, const char* key,
                            const std::string& what) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw std::runtime_error(what + ": missing \"" + key + "\" string");
  }
  std::string label = j[key].get<std::string>();
  if (normalize_label(label).empty()) {
    throw std::runtime_error(what + ": \"" + key + "\" empty after normalization");
  }
  return label;
}

}  // namespace

ordered_json scene_to_json(const SceneRecord& r) {
  ordered_json doc;
  doc["image_id"] = r.image_id;
  doc["width"] = r.width;
  doc["height"] = r.height;
  doc["target_category"] =
      r.target_category ? ordered_json(*r.target_category) : ordered_json();
  doc["objects"] = ordered_json::array();
  for (const auto& object : r.objects) {
    ordered_json jo;
    jo["name"] = object.name;
    jo["bbox"] = box_to_json(object.bbox);
    jo["parts"] = ordered_json::array();
    for (const auto& part : object.parts) {
      ordered_json jp;
      jp["part_name"] = part.name;
      jp["bbox"] = box_to_json(part.bbox);
      jp["affordances"] = ordered_json::array();
      for (const auto& aff : part.affordances) {
        ordered_json ja;
        ja["action"] = aff.action;
        ja["point"] = ordered_json::array({aff.point.x, aff.point.y});
        if (aff.affordance_box) ja["affordance_bbox"] = box_to_json(*aff.affordance_box);
        jp["affordances"].push_back(std::move(ja));
      }
      jo["parts"].push_back(std::move(jp));
    }
    doc["objects"].push_back(std::move(jo));
  }
  return doc;
}

SceneRecord scene_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("record: not a JSON object");
  SceneRecord r;
  if (!j.contains("image_id") || !j["image_id"].is_string()) {
    throw std::runtime_error("record: missing \"image_id\" string");
  }
  r.image_id = j["image_id"].get<std::string>();
  const std::string what = "record " + r.image_id;

  if (!j.contains("width") || !j["width"].is_number_integer() ||
      !j.contains("height") || !j["height"].is_number_integer()) {
    throw std::runtime_error(what + ": width/height must be integers");
  }
  r.width = j["width"].get<int>();
  r.height = j["height"].get<int>();
  if (r.width <= 0 || r.height <= 0) {
    throw std::runtime_error(what + ": width/height must be positive");
  }
  if (j.contains("target_category") && !j["target_category"].is_null()) {
    if (!j["target_category"].is_string()) {
      throw std::runtime_error(what + ": target_category must be a string or null");
    }
    r.target_category = j["target_category"].get<std::string>();
  }
  if (!j.contains("objects") || !j["objects"].is_array()) {
    throw std::runtime_error(what + ": missing \"objects\" array");
  }
  for (const auto& jo : j["objects"]) {
    if (!jo.is_object()) throw std::runtime_error(what + ": object entry not an object");
    ObjectNode object;
    object.name = label_from_json(jo, "name", what);
    object.bbox = box_from_json(jo.value("bbox", json()), what + "/" + object.name);
    if (!jo.contains("parts") || !jo["parts"].is_array()) {
      throw std::runtime_error(what + ": object missing \"parts\" array");
    }
    for (const auto& jp : jo["parts"]) {
      if (!jp.is_object()) throw std::runtime_error(what + ": part entry not an object");
      PartNode part;
      part.name = label_from_json(jp, "part_name", what);
      part.bbox = box_from_json(jp.value("bbox", json()), what + "/" + part.name);
      if (!jp.contains("affordances") || !jp["affordances"].is_array()) {
        throw std::runtime_error(what + ": part missing \"affordances\" array");
      }
      for (const auto& ja : jp["affordances"]) {
        if (!ja.is_object()) {
          throw std::runtime_error(what + ": affordance entry not an object");
        }
        Affordance aff;
        aff.action = label_from_json(ja, "action", what);
        const json& jp2 = ja.value("point", json());
        if (!jp2.is_array() || jp2.size() != 2 || !jp2[0].is_number() ||
            !jp2[1].is_number()) {
          throw std::runtime_error(what + ": point must be [x, y]");
        }
        aff.point = {jp2[0].get<double>(), jp2[1].get<double>()};
        if (!std::isfinite(aff.point.x) || !std::isfinite(aff.point.y)) {
          throw std::runtime_error(what + ": point not finite");
        }
        if (ja.contains("affordance_bbox") && !ja["affordance_bbox"].is_null()) {
          aff.affordance_box = box_from_json(ja["affordance_bbox"], what + "/affordance");
        }
        part.affordances.push_back(std::move(aff));
      }
      object.parts.push_back(std::move(part));
    }
    r.objects.push_back(std::move(object));
  }
  return r;
}

JsonlReadResult read_scene_jsonl(const std::filesystem::path& path,
                                 LinePolicy policy) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  JsonlReadResult result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.records.push_back(scene_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      const std::string message = "line " + std::to_string(line_number) + ": " + e.what();
      if (policy == LinePolicy::kAbort) {
        throw std::runtime_error(path.string() + ": " + message);
      }
      result.skipped.push_back({line_number, message});
    }
  }
  return result;
}

void write_scene_jsonl(std::span<const SceneRecord> records,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (const auto& r : records) {
    out << scene_to_json(r).dump() << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

}  // namespace scenetree
