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

#include "scenetree/flat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scenetree/serialization.hpp"

namespace scenetree {

using nlohmann::json;
using nlohmann::ordered_json;

SceneRecord to_hierarchy(std::span<const TripletRecord> triplets,
                         std::size_t* dropped_duplicates) {
  SceneRecord record;
  std::size_t duplicates = 0;

  // Object and part keys use normalized names plus exact box equality; linear
  // scans keep first-appearance order without extra bookkeeping.
  for (const auto& t : triplets) {
    const std::string object_name = normalize_label(t.object);
    auto obj_it = std::find_if(
        record.objects.begin(), record.objects.end(), [&](const ObjectNode& o) {
          return normalize_label(o.name) == object_name && o.bbox == t.object_box;
        });
    if (obj_it == record.objects.end()) {
      record.objects.push_back({t.object, t.object_box, {}});
      obj_it = std::prev(record.objects.end());
    }

    const std::string part_name = normalize_label(t.part);
    auto part_it = std::find_if(
        obj_it->parts.begin(), obj_it->parts.end(), [&](const PartNode& p) {
          return normalize_label(p.name) == part_name && p.bbox == t.part_box;
        });
    if (part_it == obj_it->parts.end()) {
      obj_it->parts.push_back({t.part, t.part_box, {}});
      part_it = std::prev(obj_it->parts.end());
    }

    const std::string action = normalize_label(t.action);
    const bool duplicate = std::any_of(
        part_it->affordances.begin(), part_it->affordances.end(),
        [&](const Affordance& a) {
          return normalize_label(a.action) == action && a.point == t.affordance_point;
        });
    if (duplicate) {
      ++duplicates;
      continue;
    }
    part_it->affordances.push_back({t.action, t.affordance_point, {}});
  }

  if (dropped_duplicates) *dropped_duplicates = duplicates;
  return record;
}

std::vector<TripletRecord> flatten(const SceneRecord& r) {
  std::vector<TripletRecord> triplets;
  for (const auto& object : r.objects) {
    for (const auto& part : object.parts) {
      for (const auto& aff : part.affordances) {
        triplets.push_back({object.name, object.bbox, part.name, part.bbox,
                            aff.action, aff.point});
      }
    }
  }
  return triplets;
}

namespace {

std::vector<int> tokens_from_flat(const json& v, std::size_t expect, double w,
                                  double h, const char* key,
                                  const std::string& what) {
  if (w <= 0.0 || h <= 0.0) {
    throw std::runtime_error(what + ": coordinate tokens need width/height");
  }
  const auto bins = decode_coord_tokens(v.get_ref<const std::string&>());
  if (!bins || bins->size() != expect) {
    throw std::runtime_error(what + ": \"" + key + "\" is not a valid " +
                             std::to_string(expect) + "-token string");
  }
  return *bins;
}

BBox box_from_flat(const json& j, const char* key, double w, double h,
                   const std::string& what) {
  if (!j.contains(key)) {
    throw std::runtime_error(what + ": missing \"" + key + "\"");
  }
  const json& v = j[key];
  if (v.is_string()) {
    const auto bins = tokens_from_flat(v, 4, w, h, key, what);
    BBox b{dequantize(bins[0], w), dequantize(bins[1], h),
           dequantize(bins[2], w), dequantize(bins[3], h)};
    if (!box_ordered(b)) {
      throw std::runtime_error(what + ": \"" + key + "\" tokens not ordered");
    }
    return b;
  }
  if (v.is_array() && v.size() == 4 && v[0].is_number() && v[1].is_number() &&
      v[2].is_number() && v[3].is_number()) {
    BBox b{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
           v[3].get<double>()};
    if (!box_finite(b) || !box_ordered(b)) {
      throw std::runtime_error(what + ": \"" + key + "\" not a valid box");
    }
    return b;
  }
  throw std::runtime_error(what + ": \"" + key +
                           "\" must be [x1,y1,x2,y2] or a token string");
}

Point point_from_flat(const json& j, const char* key, double w, double h,
                      const std::string& what) {
  if (!j.contains(key)) {
    throw std::runtime_error(what + ": missing \"" + key + "\"");
  }
  const json& v = j[key];
  if (v.is_string()) {
    const auto bins = tokens_from_flat(v, 2, w, h, key, what);
    return {dequantize(bins[0], w), dequantize(bins[1], h)};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    Point p{v[0].get<double>(), v[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::runtime_error(what + ": \"" + key + "\" not finite");
    }
    return p;
  }
  throw std::runtime_error(what + ": \"" + key +
                           "\" must be [x,y] or a token string");
}

std::string flat_label(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw std::runtime_error(what + ": missing \"" + key + "\" string");
  }
  std::string label = j[key].get<std::string>();
  if (normalize_label(label).empty()) {
    throw std::runtime_error(what + ": \"" + key + "\" empty after normalization");
  }
  return label;
}

json number_box(const BBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

}  // namespace

FlatDocument flat_from_json(const json& j, int default_width,
                            int default_height) {
  if (!j.is_object()) throw std::runtime_error("flat document: not a JSON object");
  FlatDocument doc;
  doc.image_id = j.value("image_id", std::string{});
  doc.width = j.value("width", default_width);
  doc.height = j.value("height", default_height);
  if (!j.contains("triplets") || !j["triplets"].is_array()) {
    throw std::runtime_error("flat document: missing \"triplets\" array");
  }
  std::size_t index = 0;
  for (const auto& jt : j["triplets"]) {
    const std::string what = "triplet[" + std::to_string(index++) + "]";
    if (!jt.is_object()) throw std::runtime_error(what + ": not a JSON object");
    TripletRecord t;
    t.object = flat_label(jt, "object", what);
    t.object_box = box_from_flat(jt, "object_box", doc.width, doc.height, what);
    t.part = flat_label(jt, "part", what);
    t.part_box = box_from_flat(jt, "part_box", doc.width, doc.height, what);
    t.action = flat_label(jt, "action", what);
    t.affordance_point =
        point_from_flat(jt, "affordance_point", doc.width, doc.height, what);
    doc.triplets.push_back(std::move(t));
  }
  return doc;
}

ordered_json flat_to_json(const FlatDocument& doc) {
  ordered_json out;
  if (!doc.image_id.empty()) out["image_id"] = doc.image_id;
  if (doc.width > 0) out["width"] = doc.width;
  if (doc.height > 0) out["height"] = doc.height;
  out["triplets"] = ordered_json::array();
  for (const auto& t : doc.triplets) {
    ordered_json jt;
    jt["object"] = t.object;
    jt["object_box"] = number_box(t.object_box);
    jt["part"] = t.part;
    jt["part_box"] = number_box(t.part_box);
    jt["action"] = t.action;
    jt["affordance_point"] = ordered_json::array({t.affordance_point.x, t.affordance_point.y});
    out["triplets"].push_back(std::move(jt));
  }
  return out;
}

std::vector<FlatDocument> read_flat_file(const std::filesystem::path& path,
                                         int default_width, int default_height) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<FlatDocument> docs;
  // A whole-file parse covers single documents (possibly pretty-printed) and
  // arrays of documents; failing that, fall back to one document per line.
  try {
    const json whole = json::parse(text);
    if (whole.is_array()) {
      for (const auto& j : whole) {
        docs.push_back(flat_from_json(j, default_width, default_height));
      }
    } else {
      docs.push_back(flat_from_json(whole, default_width, default_height));
    }
    return docs;
  } catch (const json::parse_error&) {
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(
          flat_from_json(json::parse(line), default_width, default_height));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + " line " +
                               std::to_string(line_number) + ": " + e.what());
    }
  }
  return docs;
}

void write_flat_file(std::span<const FlatDocument> docs,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& doc : docs) {
    out << flat_to_json(doc).dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace scenetree
