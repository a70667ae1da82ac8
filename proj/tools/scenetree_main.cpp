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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scenetree/curriculum.hpp"
#include "scenetree/evaluation.hpp"
#include "scenetree/flat.hpp"
#include "scenetree/reconstruct.hpp"
#include "scenetree/scene.hpp"
#include "scenetree/serialization.hpp"
#include "scenetree/stats.hpp"

namespace {

using namespace scenetree;

enum class LogLevel { kQuiet, kNormal, kDebug };

LogLevel log_level() {
  const char* env = std::getenv("SCENETREE_LOG");
  if (!env) return LogLevel::kNormal;
  const std::string value = env;
  if (value == "quiet") return LogLevel::kQuiet;
  if (value == "debug") return LogLevel::kDebug;
  return LogLevel::kNormal;
}

void log_warn(const std::string& message) {
  if (log_level() != LogLevel::kQuiet) std::cerr << "warning: " << message << '\n';
}

void log_debug(const std::string& message) {
  if (log_level() == LogLevel::kDebug) std::cerr << "debug: " << message << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

std::vector<double> parse_iou_list(const std::string& arg) {
  std::vector<double> taus;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    taus.push_back(std::stod(item));
  }
  if (taus.empty()) throw CLI::ValidationError("--iou", "no thresholds given");
  return taus;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path,
             const std::string& mode_name, const std::string& iou_arg,
             const std::string& out_path, const std::string& table_path,
             bool strict_pred) {
  const std::vector<double> taus = parse_iou_list(iou_arg);
  const EvalMode mode = mode_name == "object" ? EvalMode::kObject : EvalMode::kScene;

  const JsonlReadResult gt = read_scene_jsonl(gt_path, LinePolicy::kAbort);
  const JsonlReadResult pred = read_scene_jsonl(
      pred_path, strict_pred ? LinePolicy::kAbort : LinePolicy::kSkip);
  log_debug("read " + std::to_string(gt.records.size()) + " gt records, " +
            std::to_string(pred.records.size()) + " predictions");

  EvalReport report = evaluate_corpus(pred.records, gt.records, taus, mode);
  for (const auto& issue : pred.skipped) {
    report.warnings.push_back("skipped prediction " + issue.message);
  }
  for (const auto& w : report.warnings) log_warn(w);

  if (!out_path.empty()) write_json(out_path, report_to_json(report));
  const std::string table = format_report_table(report);
  if (!table_path.empty()) write_text(table_path, table);
  std::cout << table;
  return 0;
}

int cmd_convert(const std::string& in_path, const std::string& out_path,
                int width, int height, const std::string& report_path) {
  const auto docs = read_flat_file(in_path, width, height);
  std::vector<SceneRecord> records;
  nlohmann::ordered_json conversions = nlohmann::ordered_json::array();
  std::size_t doc_index = 0;
  for (const auto& doc : docs) {
    std::size_t dropped = 0;
    SceneRecord record = to_hierarchy(doc.triplets, &dropped);
    record.image_id = doc.image_id.empty()
                          ? "flat_" + std::to_string(doc_index)
                          : doc.image_id;
    record.width = doc.width > 0 ? doc.width : width;
    record.height = doc.height > 0 ? doc.height : height;
    conversions.push_back({{"image_id", record.image_id},
                           {"triplets", doc.triplets.size()},
                           {"objects", record.objects.size()},
                           {"dropped_duplicates", dropped}});
    if (dropped > 0) {
      log_warn(record.image_id + ": dropped " + std::to_string(dropped) +
               " duplicate affordances");
    }
    records.push_back(std::move(record));
    ++doc_index;
  }
  write_scene_jsonl(records, out_path);
  if (!report_path.empty()) {
    write_json(report_path, {{"conversions", conversions}});
  }
  std::cout << "converted " << records.size() << " record(s)\n";
  return 0;
}

int cmd_flatten(const std::string& in_path, const std::string& out_path) {
  const JsonlReadResult in = read_scene_jsonl(in_path, LinePolicy::kAbort);
  std::vector<FlatDocument> docs;
  for (const auto& record : in.records) {
    const SceneRecord stripped = strip_placeholders(record);
    docs.push_back({stripped.image_id, stripped.width, stripped.height,
                    flatten(stripped)});
  }
  write_flat_file(docs, out_path);
  std::cout << "flattened " << docs.size() << " record(s)\n";
  return 0;
}

int cmd_validate(const std::string& in_path, bool strict,
                 const std::string& out_path, double containment_min) {
  const JsonlReadResult in = read_scene_jsonl(in_path, LinePolicy::kSkip);
  nlohmann::ordered_json per_record = nlohmann::ordered_json::array();
  std::size_t error_count = 0;
  std::size_t warning_count = 0;
  for (const auto& issue : in.skipped) {
    ++error_count;
    per_record.push_back({{"line", issue.line}, {"error", issue.message}});
    std::cout << "error: " << issue.message << '\n';
  }
  const ValidationConfig cfg{containment_min};
  for (const auto& record : in.records) {
    const ValidationReport report = validate_scene(record, cfg);
    error_count += report.errors.size();
    warning_count += report.warnings.size();
    for (const auto& e : report.errors) {
      std::cout << record.image_id << " error " << e.code << " at " << e.path
                << ": " << e.message << '\n';
    }
    for (const auto& w : report.warnings) {
      std::cout << record.image_id << " warning " << w.code << " at " << w.path
                << ": " << w.message << '\n';
    }
    if (!report.ok() || !report.warnings.empty()) {
      nlohmann::ordered_json entry;
      entry["image_id"] = record.image_id;
      entry["errors"] = nlohmann::ordered_json::array();
      for (const auto& e : report.errors) {
        entry["errors"].push_back({{"path", e.path}, {"code", e.code}, {"message", e.message}});
      }
      entry["warnings"] = nlohmann::ordered_json::array();
      for (const auto& w : report.warnings) {
        entry["warnings"].push_back({{"path", w.path}, {"code", w.code}, {"message", w.message}});
      }
      per_record.push_back(std::move(entry));
    }
  }
  std::cout << "validated " << in.records.size() << " record(s): " << error_count
            << " error(s), " << warning_count << " warning(s)\n";
  if (!out_path.empty()) {
    write_json(out_path, {{"records", in.records.size()},
                          {"errors", error_count},
                          {"warnings", warning_count},
                          {"issues", per_record}});
  }
  if (error_count > 0) return 1;
  if (strict && warning_count > 0) return 1;
  return 0;
}

int cmd_reconstruct(const std::string& scenes_path, const std::string& ann_path,
                    const std::string& out_path, const std::string& report_path,
                    const QcConfig& cfg) {
  const JsonlReadResult scenes = read_scene_jsonl(scenes_path, LinePolicy::kAbort);
  const auto groups = read_annotation_jsonl(ann_path);

  std::map<std::string, std::vector<const AnnotationGroup*>> by_image;
  for (const auto& g : groups) by_image[g.image_id].push_back(&g);

  std::vector<SceneRecord> out;
  out.reserve(scenes.records.size());
  QcReport report;
  std::vector<std::string> hard_errors;
  std::size_t matched_groups = 0;

  for (const auto& record : scenes.records) {
    SceneRecord updated = record;
    auto it = by_image.find(record.image_id);
    if (it != by_image.end()) {
      for (const AnnotationGroup* g : it->second) {
        if (g->object_index >= updated.objects.size()) {
          hard_errors.push_back(record.image_id + ": object_index " +
                                std::to_string(g->object_index) + " out of range");
          continue;
        }
        updated.objects[g->object_index] = assign_affordances(
            updated.objects[g->object_index], g->annotations, cfg, report);
        ++matched_groups;
      }
    }
    out.push_back(qc_clean(updated, cfg, report));
  }
  for (const auto& [image_id, image_groups] : by_image) {
    bool known = false;
    for (const auto& record : scenes.records) {
      if (record.image_id == image_id) {
        known = true;
        break;
      }
    }
    if (!known) {
      hard_errors.push_back("annotations for unknown image_id " + image_id);
    }
    (void)image_groups;
  }

  write_scene_jsonl(out, out_path);
  nlohmann::ordered_json jreport = qc_report_to_json(report);
  jreport["annotation_groups_applied"] = matched_groups;
  jreport["hard_errors"] = hard_errors;
  write_json(report_path, jreport);

  for (const auto& e : hard_errors) log_warn(e);
  std::cout << "reconstructed " << out.size() << " record(s), applied "
            << matched_groups << " annotation group(s)\n";
  return hard_errors.empty() ? 0 : 1;
}

int cmd_complete(const std::string& in_path, const std::string& out_path) {
  const JsonlReadResult in = read_scene_jsonl(in_path, LinePolicy::kAbort);
  std::vector<SceneRecord> out;
  out.reserve(in.records.size());
  for (const auto& record : in.records) out.push_back(pseudo_complete(record));
  write_scene_jsonl(out, out_path);
  std::cout << "completed " << out.size() << " record(s)\n";
  return 0;
}

std::vector<std::string> read_id_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::string trimmed = line.substr(first, last - first + 1);
    if (trimmed.front() == '{') {
      // JSONL dataset line; pull the image_id.
      const auto j = nlohmann::json::parse(trimmed, nullptr, false);
      if (j.is_discarded() || !j.contains("image_id") || !j["image_id"].is_string()) {
        throw std::runtime_error(path + " line " + std::to_string(line_number) +
                                 ": expected an image_id");
      }
      ids.push_back(j["image_id"].get<std::string>());
    } else {
      ids.push_back(std::move(trimmed));
    }
  }
  return ids;
}

int cmd_sample(const std::string& nonpseudo_path, const std::string& pseudo_path,
               int stage_id, std::size_t n, std::uint64_t seed,
               const std::string& out_path, const std::string& config_path) {
  const std::vector<CurriculumStage> stages =
      config_path.empty() ? default_stages() : load_stages(config_path);
  const CurriculumStage* stage = nullptr;
  for (const auto& s : stages) {
    if (s.stage_id == stage_id) stage = &s;
  }
  if (!stage) {
    throw std::runtime_error("stage " + std::to_string(stage_id) +
                             " not present in the schedule");
  }

  std::vector<std::string> nonpseudo_ids, pseudo_ids;
  if (!nonpseudo_path.empty()) nonpseudo_ids = read_id_pool(nonpseudo_path);
  if (!pseudo_path.empty()) pseudo_ids = read_id_pool(pseudo_path);

  std::vector<SampleManifest> manifests;
  for (int epoch = 1; epoch <= stage->epochs; ++epoch) {
    manifests.push_back(
        sample_epoch(nonpseudo_ids, pseudo_ids, *stage, epoch, seed, n));
  }
  write_manifest_jsonl(manifests, out_path);
  std::cout << "stage " << stage->stage_id << ": wrote " << manifests.size()
            << " epoch manifest(s) of " << n << " entries (pseudo fraction "
            << stage->pseudo_fraction << ")\n";
  return 0;
}

int cmd_stats(const std::string& in_path, std::size_t top_k,
              const std::string& out_path) {
  const JsonlReadResult in = read_scene_jsonl(in_path, LinePolicy::kAbort);
  const StatsReport report = corpus_stats(in.records, top_k);
  if (!out_path.empty()) write_json(out_path, stats_to_json(report));
  std::cout << format_stats_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenetree: hierarchical scene annotation toolkit"};
  app.require_subcommand(1);

  // eval
  std::string eval_gt, eval_pred, eval_out, eval_table;
  std::string eval_mode = "scene";
  std::string eval_iou = "0.5";
  bool eval_strict = false;
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--gt", eval_gt, "ground-truth JSONL")->required();
  eval->add_option("--pred", eval_pred, "prediction JSONL")->required();
  eval->add_option("--mode", eval_mode, "object|scene")
      ->check(CLI::IsMember({"object", "scene"}));
  eval->add_option("--iou", eval_iou, "comma-separated IoU thresholds");
  eval->add_option("--out", eval_out, "report JSON path");
  eval->add_option("--table", eval_table, "report table path");
  eval->add_flag("--strict", eval_strict, "abort on malformed prediction lines");

  // convert
  std::string convert_in, convert_out, convert_report;
  int convert_width = 1000, convert_height = 1000;
  auto* convert = app.add_subcommand("convert", "flat triplets -> hierarchy JSONL");
  convert->add_option("--in", convert_in, "flat-triplet JSON/JSONL")->required();
  convert->add_option("--out", convert_out, "output dataset JSONL")->required();
  convert->add_option("--width", convert_width, "fallback image width");
  convert->add_option("--height", convert_height, "fallback image height");
  convert->add_option("--report", convert_report, "conversion report JSON");

  // flatten
  std::string flatten_in, flatten_out;
  auto* flat = app.add_subcommand("flatten", "hierarchy JSONL -> flat triplets");
  flat->add_option("--in", flatten_in, "dataset JSONL")->required();
  flat->add_option("--out", flatten_out, "output flat-triplet JSONL")->required();

  // validate
  std::string validate_in, validate_out;
  bool validate_strict = false;
  double validate_containment = 0.95;
  auto* validate = app.add_subcommand("validate", "structural checks on a dataset");
  validate->add_option("--in", validate_in, "dataset JSONL")->required();
  validate->add_flag("--strict", validate_strict, "fail on warnings too");
  validate->add_option("--out", validate_out, "report JSON path");
  validate->add_option("--containment-min", validate_containment,
                       "part containment warning threshold");

  // reconstruct
  std::string rec_scenes, rec_ann, rec_out, rec_report;
  QcConfig rec_cfg;
  auto* rec = app.add_subcommand("reconstruct",
                                 "attach affordance annotations and clean");
  rec->add_option("--scenes", rec_scenes, "scenes JSONL (objects+parts)")->required();
  rec->add_option("--annotations", rec_ann, "annotation JSONL")->required();
  rec->add_option("--out", rec_out, "output dataset JSONL")->required();
  rec->add_option("--report", rec_report, "QC report JSON (default <out>.qc.json)");
  rec->add_option("--containment-min", rec_cfg.containment_min,
                  "part containment floor");
  rec->add_option("--dup-iou", rec_cfg.dup_iou, "duplicate IoU threshold");
  rec->add_option("--min-confidence", rec_cfg.min_confidence,
                  "annotation confidence floor");

  // complete
  std::string complete_in, complete_out;
  auto* complete = app.add_subcommand("complete",
                                      "insert structural-completion placeholders");
  complete->add_option("--in", complete_in, "dataset JSONL")->required();
  complete->add_option("--out", complete_out, "output dataset JSONL")->required();

  // sample
  std::string sample_nonpseudo, sample_pseudo, sample_out, sample_config;
  int sample_stage = 1;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 0;
  auto* sample = app.add_subcommand("sample", "emit curriculum epoch manifests");
  sample->add_option("--nonpseudo", sample_nonpseudo, "nonpseudo id file/JSONL");
  sample->add_option("--pseudo", sample_pseudo, "pseudo id file/JSONL");
  sample->add_option("--stage", sample_stage, "curriculum stage id")->required();
  sample->add_option("--n", sample_n, "entries per epoch")->required();
  sample->add_option("--seed", sample_seed, "manifest seed");
  sample->add_option("--out", sample_out, "manifest JSONL path")->required();
  sample->add_option("--config", sample_config, "stage schedule JSON");

  // stats
  std::string stats_in, stats_out;
  std::size_t stats_top_k = 30;
  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--in", stats_in, "dataset JSONL")->required();
  stats->add_option("--top-k", stats_top_k, "composition list size");
  stats->add_option("--out", stats_out, "report JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) {
      return cmd_eval(eval_gt, eval_pred, eval_mode, eval_iou, eval_out,
                      eval_table, eval_strict);
    }
    if (convert->parsed()) {
      return cmd_convert(convert_in, convert_out, convert_width, convert_height,
                         convert_report);
    }
    if (flat->parsed()) return cmd_flatten(flatten_in, flatten_out);
    if (validate->parsed()) {
      return cmd_validate(validate_in, validate_strict, validate_out,
                          validate_containment);
    }
    if (rec->parsed()) {
      if (rec_report.empty()) rec_report = rec_out + ".qc.json";
      return cmd_reconstruct(rec_scenes, rec_ann, rec_out, rec_report, rec_cfg);
    }
    if (complete->parsed()) return cmd_complete(complete_in, complete_out);
    if (sample->parsed()) {
      return cmd_sample(sample_nonpseudo, sample_pseudo, sample_stage, sample_n,
                        sample_seed, sample_out, sample_config);
    }
    if (stats->parsed()) return cmd_stats(stats_in, stats_top_k, stats_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
