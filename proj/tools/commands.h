// Copyright 2026 The coatseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Subcommands of the coatseg tool as library calls, so tests exercise exactly
// what the binary runs.
//
// A run manifest is one JSON document; relative paths resolve against the
// manifest's directory:
//
//   {
//     "vocabulary": {"embeddings": "vocab.ovrt", "metadata": "vocab.json"},
//     "images": [
//       {"name": "scene_000",
//        "features": "scene_000_features.ovrt",          // H x W x E
//        "proposal_masks": "scene_000_masks.ovrt",       // N x H x W
//        "proposal_logits": "scene_000_logits.ovrt",     // N x (K + 1)
//        "ground_truth": {"png": "scene_000_gt.png",     // optional
//                         "json": "scene_000_gt.json"}}
//     ],
//     "coat": {"gamma": 0.5, "enabled": true},
//     "ensemble": {"alpha_seen": 0.4, "beta_unseen": 0.8, "logit_scale": 100},
//     "fusion": {"score_threshold": 0.8, "overlap_keep_ratio": 0.8,
//                "binarize_threshold": 0.5, "merge_stuff": true},
//     "loss": {"alpha_cls": 0.1, "w_cls": 2, "w_mask": 5, "w_dice": 5}
//   }

#ifndef COATSEG_TOOLS_COMMANDS_H_
#define COATSEG_TOOLS_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coatseg/metrics.h"
#include "coatseg/panoptic_io.h"
#include "coatseg/pipeline.h"
#include "coatseg/synth.h"
#include "coatseg/types.h"

namespace coatseg::cli {

struct ImageEntry {
  std::string name;
  std::filesystem::path features;
  std::filesystem::path proposal_masks;
  std::filesystem::path proposal_logits;
  std::optional<PanopticPaths> ground_truth;
};

struct RunManifest {
  std::filesystem::path embeddings;
  std::filesystem::path metadata;
  std::vector<ImageEntry> images;
  PipelineConfig config;
};

// Every field of the command-line flag set that can override the manifest.
struct Overrides {
  std::optional<double> gamma;
  bool disable_coat = false;
  std::optional<double> alpha_seen;
  std::optional<double> beta_unseen;
  std::optional<double> logit_scale;
  std::optional<double> score_threshold;
};

RunManifest ParseManifest(const std::string& json_text,
                          const std::filesystem::path& base_dir);
RunManifest LoadManifest(const std::filesystem::path& path);
// Absolute paths when `absolute`, else relative to `base_dir`.
std::string ManifestToJson(const RunManifest& manifest,
                           const std::filesystem::path& base_dir,
                           bool absolute);
void ApplyOverrides(const Overrides& o, PipelineConfig& cfg);

VocabularyEmbedding LoadVocabulary(const RunManifest& manifest);

struct LoadedImage {
  FeatureMap features;
  ProposalSet proposals;
  std::optional<PanopticFile> ground_truth;
};

// Reads and cross-checks one image's files against the vocabulary.
LoadedImage LoadImage(const ImageEntry& entry, const VocabularyEmbedding& vocab);

struct RunResult {
  std::vector<PanopticMap> panoptic;  // manifest order
  std::optional<PqReport> report;     // when every image has ground truth
};

struct RunOptions {
  int jobs = 1;
  // Replace proposals by ground-truth oracle masks and keep every mask
  // (score threshold 0). Requires ground truth.
  bool oracle_masks = false;
};

RunResult Run(const RunManifest& manifest, const RunOptions& options);

// Writes <dir>/<name>.png + .json per image and report.json when present.
void WriteRunOutputs(const RunManifest& manifest, const RunResult& result,
                     const std::filesystem::path& output_dir);

struct SweepRow {
  double gamma = 0.0;
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
};

std::vector<SweepRow> SweepGamma(const RunManifest& manifest,
                                 const std::vector<double>& gammas, int jobs);
std::string SweepToCsv(const std::vector<SweepRow>& rows);

struct EvalResult {
  PqReport report;
  std::vector<Category> vocabulary;
  std::optional<MiouResult> miou;
};

// `semantic_pred` is an optional OVRT H x W uint32 category map evaluated
// against the ground truth's semantic labels.
EvalResult Eval(const PanopticPaths& pred, const PanopticPaths& gt,
                const std::optional<std::filesystem::path>& semantic_pred);

std::string ReportToJson(const PqReport& report,
                         const std::vector<Category>& vocabulary,
                         const std::optional<MiouResult>& miou = std::nullopt);

// Generates `count` scenes (seeds spec.seed, spec.seed + 1, ...) into
// output_dir with a manifest.json; returns the manifest.
RunManifest Synthesize(const SceneSpec& spec, int count,
                       const std::filesystem::path& output_dir);

}  // namespace coatseg::cli

#endif  // COATSEG_TOOLS_COMMANDS_H_
