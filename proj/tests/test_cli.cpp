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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scenetree/serialization.hpp"
#include "support/scene_generators.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scenetree;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("scenetree_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string command = std::string(SCENETREE_CLI) + " " + args + " > " +
                              out.string() + " 2> " + err.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

fs::path write_gt_fixture(const std::string& name, int records = 4) {
  std::mt19937_64 rng(7777);
  testgen::GenConfig cfg;
  cfg.allow_empty_levels = false;
  std::vector<SceneRecord> gts;
  for (int i = 0; i < records; ++i) {
    gts.push_back(testgen::random_gt(rng, cfg, "img_" + std::to_string(i)));
  }
  const fs::path path = work_dir() / name;
  write_scene_jsonl(gts, path);
  return path;
}

}  // namespace

TEST_CASE("eval: ground truth against itself scores 100 and exits 0") {
  const fs::path gt = write_gt_fixture("gt.jsonl");
  const fs::path report = work_dir() / "report.json";
  const RunResult r = run_cli("eval --gt " + gt.string() + " --pred " + gt.string() +
                              " --mode scene --iou 0.5 --out " + report.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("L1") != std::string::npos);
  const json doc = json::parse(slurp(report));
  CHECK(doc["thresholds"][0]["L1"]["precision_pct"] == 100.0);
  CHECK(doc["thresholds"][0]["L2"]["recall_pct"] == 100.0);
  CHECK(doc["thresholds"][0]["L3"]["f1_pct"] == 100.0);
  CHECK(doc["parse_rate_pct"] == 100.0);
  CHECK(doc["warnings"].empty());
}

TEST_CASE("eval: missing prediction for an image turns into FNs plus a warning") {
  const fs::path gt = write_gt_fixture("gt_missing.jsonl", 3);
  // Keep only the first two lines of the gt as predictions.
  const fs::path pred = work_dir() / "pred_missing.jsonl";
  {
    std::ifstream in(gt);
    std::ofstream out(pred);
    std::string line;
    for (int i = 0; i < 2 && std::getline(in, line); ++i) out << line << '\n';
  }
  const fs::path report = work_dir() / "report_missing.json";
  const RunResult r = run_cli("eval --gt " + gt.string() + " --pred " +
                              pred.string() + " --out " + report.string());
  CHECK(r.exit_code == 0);
  const json doc = json::parse(slurp(report));
  CHECK(doc["thresholds"][0]["L1"]["fn"].get<int>() > 0);
  CHECK(doc["thresholds"][0]["L1"]["fp"] == 0);
  REQUIRE_FALSE(doc["warnings"].empty());
  CHECK(doc["warnings"][0].get<std::string>().find("img_2") != std::string::npos);
}

TEST_CASE("eval: malformed prediction lines obey the strict flag") {
  const fs::path gt = write_gt_fixture("gt_bad.jsonl", 2);
  const fs::path pred = work_dir() / "pred_bad.jsonl";
  {
    std::ifstream in(gt);
    std::ofstream out(pred);
    std::string line;
    std::getline(in, line);
    out << line << '\n';
    out << "{\"image_id\": \"img_1\", \"width\": -3}\n";
  }
  const fs::path report = work_dir() / "report_bad.json";
  const RunResult tolerant = run_cli("eval --gt " + gt.string() + " --pred " +
                                     pred.string() + " --out " + report.string());
  CHECK(tolerant.exit_code == 0);
  const json doc = json::parse(slurp(report));
  bool mentions_line = false;
  for (const auto& w : doc["warnings"]) {
    if (w.get<std::string>().find("line 2") != std::string::npos) mentions_line = true;
  }
  CHECK(mentions_line);

  const RunResult strict = run_cli("eval --strict --gt " + gt.string() +
                                   " --pred " + pred.string());
  CHECK(strict.exit_code != 0);
  CHECK(strict.err.find("line 2") != std::string::npos);
}

TEST_CASE("convert: the canonical three-triplet file becomes two objects") {
  const fs::path flat = work_dir() / "triplets.json";
  {
    std::ofstream out(flat);
    out << R"({
      "image_id": "kitchen", "width": 1000, "height": 1000,
      "triplets": [
        {"object": "microwave", "object_box": [100,100,500,500],
         "part": "door", "part_box": [120,140,300,480],
         "action": "open", "affordance_point": [200,300]},
        {"object": "microwave", "object_box": [100,100,500,500],
         "part": "button panel", "part_box": [320,150,480,470],
         "action": "press", "affordance_point": [400,320]},
        {"object": "drawer", "object_box": [550,600,900,800],
         "part": "handle", "part_box": [650,680,800,720],
         "action": "pull", "affordance_point": [720,700]}
      ]})";
  }
  const fs::path out_path = work_dir() / "converted.jsonl";
  const fs::path conv_report = work_dir() / "converted.report.json";
  const RunResult r = run_cli("convert --in " + flat.string() + " --out " +
                              out_path.string() + " --report " +
                              conv_report.string());
  CHECK(r.exit_code == 0);
  const JsonlReadResult records = read_scene_jsonl(out_path);
  REQUIRE(records.records.size() == 1);
  CHECK(records.records[0].image_id == "kitchen");
  REQUIRE(records.records[0].objects.size() == 2);
  CHECK(records.records[0].objects[0].parts.size() == 2);
  CHECK(count_affordances(records.records[0]) == 3);
  const json conv = json::parse(slurp(conv_report));
  CHECK(conv["conversions"][0]["dropped_duplicates"] == 0);
  CHECK(conv["conversions"][0]["triplets"] == 3);
}

TEST_CASE("convert reports dropped duplicate affordances") {
  const fs::path flat = work_dir() / "dups.json";
  {
    std::ofstream out(flat);
    out << R"({"image_id": "d", "width": 100, "height": 100, "triplets": [
      {"object": "cup", "object_box": [0,0,50,50], "part": "rim",
       "part_box": [5,5,45,20], "action": "grasp", "affordance_point": [20,10]},
      {"object": "cup", "object_box": [0,0,50,50], "part": "rim",
       "part_box": [5,5,45,20], "action": "grasp", "affordance_point": [20,10]}
    ]})";
  }
  const fs::path out_path = work_dir() / "dups_out.jsonl";
  const fs::path report = work_dir() / "dups.report.json";
  CHECK(run_cli("convert --in " + flat.string() + " --out " + out_path.string() +
                " --report " + report.string())
            .exit_code == 0);
  const json conv = json::parse(slurp(report));
  CHECK(conv["conversions"][0]["dropped_duplicates"] == 1);
  const auto records = read_scene_jsonl(out_path);
  CHECK(count_affordances(records.records[0]) == 1);
}

TEST_CASE("flatten then convert is metric-preserving on full-depth data") {
  const fs::path gt = write_gt_fixture("gt_round.jsonl", 3);
  const fs::path flat = work_dir() / "round.flat.jsonl";
  const fs::path back = work_dir() / "round.back.jsonl";
  CHECK(run_cli("flatten --in " + gt.string() + " --out " + flat.string()).exit_code == 0);
  CHECK(run_cli("convert --in " + flat.string() + " --out " + back.string()).exit_code == 0);

  const fs::path report = work_dir() / "round.report.json";
  const RunResult r = run_cli("eval --gt " + gt.string() + " --pred " +
                              back.string() + " --out " + report.string());
  CHECK(r.exit_code == 0);
  const json doc = json::parse(slurp(report));
  CHECK(doc["thresholds"][0]["L1"]["f1_pct"] == 100.0);
  CHECK(doc["thresholds"][0]["L2"]["f1_pct"] == 100.0);
  CHECK(doc["thresholds"][0]["L3"]["f1_pct"] == 100.0);
  CHECK(doc["parse_rate_pct"] == 100.0);
}

TEST_CASE("convert: empty triplet list yields an empty objects record") {
  const fs::path flat = work_dir() / "empty.json";
  std::ofstream(flat) << R"({"image_id": "e", "width": 100, "height": 100, "triplets": []})";
  const fs::path out_path = work_dir() / "empty_out.jsonl";
  CHECK(run_cli("convert --in " + flat.string() + " --out " + out_path.string())
            .exit_code == 0);
  const auto records = read_scene_jsonl(out_path);
  REQUIRE(records.records.size() == 1);
  CHECK(records.records[0].objects.empty());
}

TEST_CASE("complete then validate reports zero errors") {
  // Records with missing levels everywhere.
  const fs::path in_path = work_dir() / "partial.jsonl";
  {
    std::mt19937_64 rng(31337);
    testgen::GenConfig cfg;  // empty levels allowed
    std::vector<SceneRecord> records;
    for (int i = 0; i < 5; ++i) {
      records.push_back(testgen::random_gt(rng, cfg, "p_" + std::to_string(i)));
    }
    write_scene_jsonl(records, in_path);
  }
  const fs::path full = work_dir() / "full.jsonl";
  CHECK(run_cli("complete --in " + in_path.string() + " --out " + full.string())
            .exit_code == 0);
  const RunResult v = run_cli("validate --in " + full.string());
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("0 error(s)") != std::string::npos);

  // Full depth everywhere after completion.
  for (const auto& record : read_scene_jsonl(full).records) {
    for (const auto& object : record.objects) {
      CHECK_FALSE(object.parts.empty());
      for (const auto& part : object.parts) CHECK_FALSE(part.affordances.empty());
    }
  }
}

TEST_CASE("eval: object mode keeps off-target predictions as false positives") {
  const fs::path gt = work_dir() / "gt_object.jsonl";
  {
    SceneRecord r;
    r.image_id = "om";
    r.width = 1000;
    r.height = 1000;
    r.target_category = "cup";
    r.objects.push_back({"cup", {0, 0, 100, 100}, {}});
    r.objects.push_back({"lamp", {200, 200, 300, 300}, {}});
    write_scene_jsonl(std::vector<SceneRecord>{r}, gt);
  }
  const fs::path report = work_dir() / "report_object.json";
  const RunResult r = run_cli("eval --mode object --gt " + gt.string() +
                              " --pred " + gt.string() + " --out " + report.string());
  CHECK(r.exit_code == 0);
  const json doc = json::parse(slurp(report));
  CHECK(doc["mode"] == "object");
  CHECK(doc["thresholds"][0]["L1"]["tp"] == 1);  // only the target cup
  CHECK(doc["thresholds"][0]["L1"]["fp"] == 1);  // the off-target lamp
  CHECK(doc["thresholds"][0]["L1"]["fn"] == 0);
}

TEST_CASE("validate --strict fails on warnings") {
  const fs::path in_path = work_dir() / "warned.jsonl";
  {
    SceneRecord r;
    r.image_id = "w";
    r.width = 1000;
    r.height = 1000;
    ObjectNode o{"cabinet", {0, 0, 200, 200}, {}};
    o.parts.push_back({"door", {500, 500, 700, 700}, {}});  // badly contained
    r.objects.push_back(o);
    write_scene_jsonl(std::vector<SceneRecord>{r}, in_path);
  }
  CHECK(run_cli("validate --in " + in_path.string()).exit_code == 0);
  CHECK(run_cli("validate --strict --in " + in_path.string()).exit_code == 1);
}

TEST_CASE("sample accepts dataset JSONL as an id pool") {
  const fs::path pool = write_gt_fixture("pool.jsonl", 6);
  const fs::path out_path = work_dir() / "pool_manifest.jsonl";
  const RunResult r = run_cli("sample --nonpseudo " + pool.string() +
                              " --stage 1 --n 6 --seed 3 --out " + out_path.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(out_path);
  std::string line;
  REQUIRE(std::getline(in, line));
  const json doc = json::parse(line);
  for (const auto& e : doc["entries"]) {
    CHECK(e["id"].get<std::string>().rfind("img_", 0) == 0);
  }
}

TEST_CASE("validate flags broken records with a nonzero exit") {
  const fs::path bad = work_dir() / "bad.jsonl";
  std::ofstream(bad) << R"({"image_id": "b", "width": 100, "height": 100,)"
                     << R"( "objects": [{"name": "cup", "bbox": [90,90,200,95], "parts": []}]})"
                     << '\n';
  const RunResult r = run_cli("validate --in " + bad.string());
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("OUT_OF_BOUNDS") != std::string::npos);
}

TEST_CASE("sample: stage 2 manifests carry the 70/30 mix and reproduce exactly") {
  const fs::path nonpseudo = work_dir() / "nonpseudo.txt";
  const fs::path pseudo = work_dir() / "pseudo.txt";
  {
    std::ofstream np(nonpseudo), p(pseudo);
    for (int i = 0; i < 40; ++i) np << "n" << i << '\n';
    for (int i = 0; i < 40; ++i) p << "p" << i << '\n';
  }
  const fs::path m1 = work_dir() / "m1.jsonl";
  const fs::path m2 = work_dir() / "m2.jsonl";
  const std::string args = "sample --nonpseudo " + nonpseudo.string() +
                           " --pseudo " + pseudo.string() +
                           " --stage 2 --n 10 --seed 99 --out ";
  CHECK(run_cli(args + m1.string()).exit_code == 0);
  CHECK(run_cli(args + m2.string()).exit_code == 0);
  CHECK(slurp(m1) == slurp(m2));

  std::ifstream in(m1);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++lines;
    const json doc = json::parse(line);
    CHECK(doc["stage"] == 2);
    int pseudo_count = 0;
    for (const auto& e : doc["entries"]) {
      if (e["pool"] == "pseudo") ++pseudo_count;
    }
    CHECK(doc["entries"].size() == 10);
    CHECK(pseudo_count == 3);
  }
  CHECK(lines == 4);  // stage 2 runs four epochs
}

TEST_CASE("stats: kitchen fixture densities") {
  const fs::path in_path = work_dir() / "stats_in.jsonl";
  {
    SceneRecord r;
    r.image_id = "k";
    r.width = 1000;
    r.height = 1000;
    ObjectNode microwave{"microwave", {100, 100, 500, 500}, {}};
    microwave.parts.push_back(
        {"door", {120, 140, 300, 480}, {Affordance{"open", {200, 300}, {}}}});
    microwave.parts.push_back(
        {"button panel", {320, 150, 480, 470}, {Affordance{"press", {400, 320}, {}}}});
    r.objects.push_back(microwave);
    ObjectNode drawer{"drawer", {550, 600, 900, 800}, {}};
    drawer.parts.push_back(
        {"handle", {650, 680, 800, 720}, {Affordance{"pull", {720, 700}, {}}}});
    r.objects.push_back(drawer);
    write_scene_jsonl(std::vector<SceneRecord>{r}, in_path);
  }
  const fs::path report = work_dir() / "stats.json";
  const RunResult r = run_cli("stats --in " + in_path.string() + " --top-k 30 --out " +
                              report.string());
  CHECK(r.exit_code == 0);
  const json doc = json::parse(slurp(report));
  CHECK(doc["object_count"] == 2);
  CHECK(doc["part_count"] == 3);
  CHECK(doc["affordance_count"] == 3);
  CHECK(doc["mean_parts_per_object"] == 1.5);
  CHECK(doc["mean_affordances_per_part"] == 1.0);
  CHECK(doc["top_compositions"].size() == 3);
}

TEST_CASE("reconstruct: annotations attach and QC cleans") {
  const fs::path scenes = work_dir() / "scenes.jsonl";
  {
    SceneRecord r;
    r.image_id = "s0";
    r.width = 1000;
    r.height = 1000;
    ObjectNode microwave{"microwave", {0, 0, 400, 400}, {}};
    microwave.parts.push_back({"door", {10, 10, 200, 390}, {}});
    microwave.parts.push_back({"button panel", {220, 10, 390, 390}, {}});
    // Duplicate object the QC pass should fold away.
    ObjectNode dup = microwave;
    dup.bbox.x1 += 2;
    r.objects.push_back(microwave);
    r.objects.push_back(dup);
    write_scene_jsonl(std::vector<SceneRecord>{r}, scenes);
  }
  const fs::path anns = work_dir() / "anns.jsonl";
  {
    std::ofstream out(anns);
    out << R"({"image_id": "s0", "object_index": 0, "annotations": [)"
        << R"({"action": "open", "point": [100, 200], "box": [20, 30, 180, 370], "interaction_part": "Door", "confidence": 0.9},)"
        << R"({"action": "press", "point": [300, 200], "box": null, "interaction_part": null, "confidence": 0.9},)"
        << R"({"action": "wipe", "point": [205, 5], "box": null, "interaction_part": null, "confidence": null}]})"
        << '\n';
  }
  const fs::path out_path = work_dir() / "reconstructed.jsonl";
  const fs::path report = work_dir() / "qc.json";
  const RunResult r = run_cli("reconstruct --scenes " + scenes.string() +
                              " --annotations " + anns.string() + " --out " +
                              out_path.string() + " --report " + report.string());
  CHECK(r.exit_code == 0);

  const auto records = read_scene_jsonl(out_path);
  REQUIRE(records.records.size() == 1);
  REQUIRE(records.records[0].objects.size() == 1);  // duplicate folded
  const ObjectNode& object = records.records[0].objects[0];
  CHECK(object.parts[0].affordances.size() == 1);  // textual: open on door
  CHECK(object.parts[1].affordances.size() == 1);  // geometric: press on panel
  const json doc = json::parse(slurp(report));
  CHECK(doc["counts"]["assigned_textual"] == 1);
  CHECK(doc["counts"]["assigned_geometric"] == 1);
  CHECK(doc["counts"]["dropped_unassigned"] == 1);
  CHECK(doc["counts"]["dropped_duplicates"] == 1);
  CHECK(doc["hard_errors"].empty());
}

TEST_CASE("reconstruct: bad object_index is a hard error") {
  const fs::path scenes = work_dir() / "scenes2.jsonl";
  {
    SceneRecord r;
    r.image_id = "s1";
    r.width = 100;
    r.height = 100;
    r.objects.push_back({"cup", {0, 0, 50, 50}, {}});
    write_scene_jsonl(std::vector<SceneRecord>{r}, scenes);
  }
  const fs::path anns = work_dir() / "anns2.jsonl";
  std::ofstream(anns) << R"({"image_id": "s1", "object_index": 5, "annotations": []})"
                      << '\n';
  const fs::path out_path = work_dir() / "reconstructed2.jsonl";
  const RunResult r = run_cli("reconstruct --scenes " + scenes.string() +
                              " --annotations " + anns.string() + " --out " +
                              out_path.string());
  CHECK(r.exit_code == 1);
}
