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


#include "commands.h"

#include <atomic>
#include <cstdio>
#include <exception>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "coatseg/error.h"
#include "coatseg/tensor_io.h"

namespace coatseg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string DimsOf(const Tensor& t) {
  std::string s;
  for (std::size_t i = 0; i < t.dims.size(); ++i) {
    s += (i ? "x" : "") + std::to_string(t.dims[i]);
  }
  return s;
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path RequireExisting(const fs::path& p) {
  if (!fs::exists(p)) {
    throw Error(ErrorCode::kNotFound, "file not found: " + p.string());
  }
  return p;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// in index order is rethrown.
template <typename Fn>
void ParallelFor(std::size_t n, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void CheckVocabularyNames(const std::vector<Category>& expected,
                          const std::vector<Category>& actual,
                          const std::string& what) {
  std::vector<std::string> differing;
  const std::size_t n = std::max(expected.size(), actual.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string a = i < expected.size() ? expected[i].name : "<missing>";
    const std::string b = i < actual.size() ? actual[i].name : "<missing>";
    if (a != b) differing.push_back(std::to_string(i) + ": " + a + " vs " + b);
  }
  if (!differing.empty()) {
    std::string message = what + " vocabulary differs:";
    for (const auto& d : differing) message += " [" + d + "]";
    throw Error(ErrorCode::kVocabularyMismatch, message);
  }
}

ordered_json AggregateJson(const PqAggregate& a) {
  return {{"pq", a.pq}, {"sq", a.sq}, {"rq", a.rq}, {"n", a.n}};
}

}  // namespace

RunManifest ParseManifest(const std::string& json_text, const fs::path& base_dir) {
  RunManifest m;
  try {
    const json doc = json::parse(json_text);
    const json& vocab = doc.at("vocabulary");
    m.embeddings = Resolve(base_dir, vocab.at("embeddings").get<std::string>());
    m.metadata = Resolve(base_dir, vocab.at("metadata").get<std::string>());
    for (const json& img : doc.at("images")) {
      ImageEntry e;
      e.name = img.at("name").get<std::string>();
      e.features = Resolve(base_dir, img.at("features").get<std::string>());
      e.proposal_masks =
          Resolve(base_dir, img.at("proposal_masks").get<std::string>());
      e.proposal_logits =
          Resolve(base_dir, img.at("proposal_logits").get<std::string>());
      if (img.contains("ground_truth")) {
        const json& gt = img.at("ground_truth");
        e.ground_truth =
            PanopticPaths{Resolve(base_dir, gt.at("png").get<std::string>()),
                          Resolve(base_dir, gt.at("json").get<std::string>())};
      }
      m.images.push_back(std::move(e));
    }
    PipelineConfig& c = m.config;
    if (doc.contains("coat")) {
      const json& j = doc.at("coat");
      c.coat.gamma = j.value("gamma", c.coat.gamma);
      c.coat.enabled = j.value("enabled", c.coat.enabled);
    }
    if (doc.contains("ensemble")) {
      const json& j = doc.at("ensemble");
      c.ensemble.alpha_seen = j.value("alpha_seen", c.ensemble.alpha_seen);
      c.ensemble.beta_unseen = j.value("beta_unseen", c.ensemble.beta_unseen);
      c.ensemble.logit_scale = j.value("logit_scale", c.ensemble.logit_scale);
    }
    if (doc.contains("fusion")) {
      const json& j = doc.at("fusion");
      c.fusion.score_threshold =
          j.value("score_threshold", c.fusion.score_threshold);
      c.fusion.overlap_keep_ratio =
          j.value("overlap_keep_ratio", c.fusion.overlap_keep_ratio);
      c.fusion.binarize_threshold =
          j.value("binarize_threshold", c.fusion.binarize_threshold);
      c.fusion.merge_stuff = j.value("merge_stuff", c.fusion.merge_stuff);
    }
    if (doc.contains("loss")) {
      const json& j = doc.at("loss");
      c.loss.alpha_cls = j.value("alpha_cls", c.loss.alpha_cls);
      c.loss.w_cls = j.value("w_cls", c.loss.w_cls);
      c.loss.w_mask = j.value("w_mask", c.loss.w_mask);
      c.loss.w_dice = j.value("w_dice", c.loss.w_dice);
      c.loss.void_weight = j.value("void_weight", c.loss.void_weight);
      c.loss.point_sample_count =
          j.value("point_sample_count", c.loss.point_sample_count);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad manifest: ") + e.what());
  }
  CheckConfig(m.config.coat);
  CheckConfig(m.config.ensemble);
  CheckConfig(m.config.fusion);
  CheckConfig(m.config.loss);
  return m;
}

RunManifest LoadManifest(const fs::path& path) {
  RequireExisting(path);
  return ParseManifest(ReadTextFile(path), path.parent_path());
}

std::string ManifestToJson(const RunManifest& m, const fs::path& base_dir,
                           bool absolute) {
  auto out = [&](const fs::path& p) {
    return absolute ? fs::absolute(p).lexically_normal().string()
                    : fs::relative(p, base_dir).string();
  };
  ordered_json doc;
  doc["vocabulary"] = {{"embeddings", out(m.embeddings)},
                       {"metadata", out(m.metadata)}};
  doc["images"] = ordered_json::array();
  for (const ImageEntry& e : m.images) {
    ordered_json img = {{"name", e.name},
                        {"features", out(e.features)},
                        {"proposal_masks", out(e.proposal_masks)},
                        {"proposal_logits", out(e.proposal_logits)}};
    if (e.ground_truth) {
      img["ground_truth"] = {{"png", out(e.ground_truth->png)},
                             {"json", out(e.ground_truth->json)}};
    }
    doc["images"].push_back(img);
  }
  const PipelineConfig& c = m.config;
  doc["coat"] = {{"gamma", c.coat.gamma}, {"enabled", c.coat.enabled}};
  doc["ensemble"] = {{"alpha_seen", c.ensemble.alpha_seen},
                     {"beta_unseen", c.ensemble.beta_unseen},
                     {"logit_scale", c.ensemble.logit_scale}};
  doc["fusion"] = {{"score_threshold", c.fusion.score_threshold},
                   {"overlap_keep_ratio", c.fusion.overlap_keep_ratio},
                   {"binarize_threshold", c.fusion.binarize_threshold},
                   {"merge_stuff", c.fusion.merge_stuff}};
  doc["loss"] = {{"alpha_cls", c.loss.alpha_cls},
                 {"w_cls", c.loss.w_cls},
                 {"w_mask", c.loss.w_mask},
                 {"w_dice", c.loss.w_dice},
                 {"void_weight", c.loss.void_weight},
                 {"point_sample_count", c.loss.point_sample_count}};
  return doc.dump(2) + "\n";
}

void ApplyOverrides(const Overrides& o, PipelineConfig& cfg) {
  if (o.gamma) cfg.coat.gamma = *o.gamma;
  if (o.disable_coat) cfg.coat.enabled = false;
  if (o.alpha_seen) cfg.ensemble.alpha_seen = *o.alpha_seen;
  if (o.beta_unseen) cfg.ensemble.beta_unseen = *o.beta_unseen;
  if (o.logit_scale) cfg.ensemble.logit_scale = *o.logit_scale;
  if (o.score_threshold) cfg.fusion.score_threshold = *o.score_threshold;
  CheckConfig(cfg.coat);
  CheckConfig(cfg.ensemble);
  CheckConfig(cfg.fusion);
}

VocabularyEmbedding LoadVocabulary(const RunManifest& manifest) {
  const Tensor t = ReadTensor(RequireExisting(manifest.embeddings));
  if (t.dims.size() != 2) {
    throw Error(ErrorCode::kShape, manifest.embeddings.string() +
                                       ": expected K x E embeddings, got dims " +
                                       DimsOf(t));
  }
  VocabularyEmbedding v;
  v.categories = ParseVocabularyJson(ReadTextFile(RequireExisting(manifest.metadata)));
  if (v.categories.size() != t.dims[0]) {
    throw Error(ErrorCode::kShape,
                manifest.metadata.string() + " lists " +
                    std::to_string(v.categories.size()) + " categories but " +
                    manifest.embeddings.string() + " has dims " + DimsOf(t));
  }
  try {
    v.embeddings = NormalizeRows(MatrixFromTensor(t));
  } catch (const Error& e) {
    throw Error(e.code(), manifest.embeddings.string() + ": " + e.what());
  }
  ThrowIfInvalid(ValidateVocabulary(v), "vocabulary");
  return v;
}

LoadedImage LoadImage(const ImageEntry& entry, const VocabularyEmbedding& vocab) {
  LoadedImage img;
  const Tensor ft = ReadTensor(RequireExisting(entry.features));
  if (ft.dims.size() != 3 || ft.dims[2] != vocab.dim()) {
    throw Error(ErrorCode::kShape,
                entry.features.string() + ": expected H x W x " +
                    std::to_string(vocab.dim()) + " features, got dims " +
                    DimsOf(ft));
  }
  img.features = FeatureMapFromTensor(ft);

  const Tensor mt = ReadTensor(RequireExisting(entry.proposal_masks));
  if (mt.dims.size() != 3 ||
      mt.dims[1] != static_cast<std::uint32_t>(img.features.height) ||
      mt.dims[2] != static_cast<std::uint32_t>(img.features.width)) {
    throw Error(ErrorCode::kShape,
                entry.proposal_masks.string() + ": expected N x " +
                    std::to_string(img.features.height) + " x " +
                    std::to_string(img.features.width) + " masks, got dims " +
                    DimsOf(mt));
  }
  img.proposals.masks = MaskLogitsFromTensor(mt);

  const Tensor lt = ReadTensor(RequireExisting(entry.proposal_logits));
  if (lt.dims.size() != 2 || lt.dims[0] != mt.dims[0] ||
      lt.dims[1] != vocab.size() + 1) {
    throw Error(ErrorCode::kShape,
                entry.proposal_logits.string() + ": expected " +
                    std::to_string(mt.dims[0]) + " x " +
                    std::to_string(vocab.size() + 1) + " logits, got dims " +
                    DimsOf(lt));
  }
  img.proposals.train_logits = MatrixFromTensor(lt);
  ThrowIfInvalid(ValidateProposals(img.proposals), entry.name + " proposals");

  if (entry.ground_truth) {
    RequireExisting(entry.ground_truth->png);
    RequireExisting(entry.ground_truth->json);
    PanopticFile gt = ReadPanoptic(*entry.ground_truth);
    if (gt.map.height != img.features.height ||
        gt.map.width != img.features.width) {
      throw Error(ErrorCode::kShape,
                  entry.ground_truth->png.string() + ": ground truth is " +
                      std::to_string(gt.map.height) + "x" +
                      std::to_string(gt.map.width) + ", features are " +
                      std::to_string(img.features.height) + "x" +
                      std::to_string(img.features.width));
    }
    if (!gt.vocabulary.empty()) {
      CheckVocabularyNames(vocab.categories, gt.vocabulary,
                           entry.ground_truth->json.string());
    }
    ThrowIfInvalid(ValidatePanoptic(gt.map, static_cast<int>(vocab.size())),
                   entry.ground_truth->png.string());
    img.ground_truth = std::move(gt);
  }
  return img;
}

RunResult Run(const RunManifest& manifest, const RunOptions& options) {
  const VocabularyEmbedding vocab = LoadVocabulary(manifest);
  PipelineConfig cfg = manifest.config;
  if (options.oracle_masks) cfg.fusion.score_threshold = 0.0;

  const std::size_t n = manifest.images.size();
  RunResult result;
  result.panoptic.resize(n);
  std::vector<std::optional<PqStats>> stats(n);
  ParallelFor(n, options.jobs, [&](std::size_t i) {
    LoadedImage img = LoadImage(manifest.images[i], vocab);
    if (options.oracle_masks) {
      if (!img.ground_truth) {
        throw Error(ErrorCode::kInvalidArgument,
                    manifest.images[i].name +
                        ": oracle masks need ground truth");
      }
      img.proposals = OracleMasks(img.ground_truth->map,
                                  static_cast<int>(vocab.size()));
    }
    InferenceResult r = RunInference(img.proposals, img.features, vocab, cfg);
    if (img.ground_truth) {
      stats[i] = AccumulatePq(r.panoptic, img.ground_truth->map, vocab.size());
    }
    result.panoptic[i] = std::move(r.panoptic);
  });

  const bool all_gt = n > 0 && std::all_of(stats.begin(), stats.end(),
                                           [](const auto& s) { return s.has_value(); });
  if (all_gt) {
    PqStats total(vocab.size());
    for (const auto& s : stats) total += *s;
    result.report = SummarizePq(total, vocab.categories);
  }
  return result;
}

void WriteRunOutputs(const RunManifest& manifest, const RunResult& result,
                     const fs::path& output_dir) {
  fs::create_directories(output_dir);
  const auto categories =
      ParseVocabularyJson(ReadTextFile(RequireExisting(manifest.metadata)));
  for (std::size_t i = 0; i < manifest.images.size(); ++i) {
    const std::string& name = manifest.images[i].name;
    WritePanoptic(result.panoptic[i], categories,
                  {output_dir / (name + ".png"), output_dir / (name + ".json")});
  }
  if (result.report) {
    WriteTextFile(output_dir / "report.json",
                  ReportToJson(*result.report, categories));
  }
}

std::vector<SweepRow> SweepGamma(const RunManifest& manifest,
                                 const std::vector<double>& gammas, int jobs) {
  for (const auto& img : manifest.images) {
    if (!img.ground_truth) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sweep-gamma needs ground truth for image " + img.name);
    }
  }
  std::vector<SweepRow> rows;
  for (double g : gammas) {
    RunManifest m = manifest;
    m.config.coat.gamma = g;
    CheckConfig(m.config.coat);
    const RunResult r = Run(m, {jobs, false});
    rows.push_back({g, r.report->all.pq, r.report->all.sq, r.report->all.rq});
  }
  return rows;
}

std::string SweepToCsv(const std::vector<SweepRow>& rows) {
  std::string out = "gamma,pq,sq,rq\n";
  char line[128];
  for (const SweepRow& r : rows) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f\n", r.gamma, r.pq,
                  r.sq, r.rq);
    out += line;
  }
  return out;
}

EvalResult Eval(const PanopticPaths& pred, const PanopticPaths& gt,
                const std::optional<fs::path>& semantic_pred) {
  RequireExisting(pred.png);
  RequireExisting(pred.json);
  RequireExisting(gt.png);
  RequireExisting(gt.json);
  const PanopticFile p = ReadPanoptic(pred);
  const PanopticFile g = ReadPanoptic(gt);
  if (g.vocabulary.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                gt.json.string() + ": ground-truth sidecar lists no vocabulary");
  }
  if (!p.vocabulary.empty()) {
    CheckVocabularyNames(g.vocabulary, p.vocabulary, "prediction");
  }
  EvalResult out;
  out.vocabulary = g.vocabulary;
  out.report = PanopticQuality(p.map, g.map, g.vocabulary);
  if (semantic_pred) {
    const Tensor t = ReadTensor(RequireExisting(*semantic_pred));
    if (t.dims.size() != 2 ||
        t.dims[0] != static_cast<std::uint32_t>(g.map.height) ||
        t.dims[1] != static_cast<std::uint32_t>(g.map.width)) {
      throw Error(ErrorCode::kShape, semantic_pred->string() +
                                         ": expected an H x W category map, "
                                         "got dims " + DimsOf(t));
    }
    std::vector<int> labels(t.values.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      labels[i] = static_cast<int>(t.values[i]);
    }
    const SemanticLabels truth = SemanticFromPanoptic(g.map);
    out.miou = Miou(labels, truth.category, truth.is_void,
                    static_cast<int>(g.vocabulary.size()));
  }
  return out;
}

std::string ReportToJson(const PqReport& report,
                         const std::vector<Category>& vocabulary,
                         const std::optional<MiouResult>& miou) {
  ordered_json doc;
  doc["all"] = AggregateJson(report.all);
  doc["things"] = AggregateJson(report.things);
  doc["stuff"] = AggregateJson(report.stuff);
  doc["seen"] = AggregateJson(report.seen);
  doc["unseen"] = AggregateJson(report.unseen);
  doc["gt_weighted"] = AggregateJson(report.gt_weighted);
  doc["per_category"] = ordered_json::array();
  for (const CategoryPq& c : report.per_category) {
    if (!c.populated) continue;
    const Category& cat = vocabulary.at(c.category);
    doc["per_category"].push_back({{"category", c.category},
                                   {"name", cat.name},
                                   {"seen", cat.seen},
                                   {"thing", cat.thing},
                                   {"pq", c.pq},
                                   {"sq", c.sq},
                                   {"rq", c.rq},
                                   {"tp", c.stats.tp},
                                   {"fp", c.stats.fp},
                                   {"fn", c.stats.fn},
                                   {"iou_sum", c.stats.iou_sum}});
  }
  if (miou) {
    ordered_json per = ordered_json::array();
    for (std::size_t c = 0; c < miou->iou.size(); ++c) {
      if (!miou->in_gt[c]) continue;
      per.push_back({{"category", c}, {"iou", miou->iou[c]}});
    }
    doc["miou"] = {{"mean", miou->mean}, {"per_category", per}};
  }
  return doc.dump(2) + "\n";
}

RunManifest Synthesize(const SceneSpec& spec, int count,
                       const fs::path& output_dir) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image count must be >= 1");
  }
  fs::create_directories(output_dir);
  RunManifest m;
  m.embeddings = output_dir / "vocab.ovrt";
  m.metadata = output_dir / "vocab.json";
  for (int i = 0; i < count; ++i) {
    SceneSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    s.vocab_seed = spec.vocab_seed.value_or(spec.seed);
    const Scene scene = GenerateScene(s);
    if (i == 0) {
      WriteTensor(ToTensor(scene.vocab.embeddings, DType::kFloat64), m.embeddings);
      WriteTextFile(m.metadata, VocabularyToJson(scene.vocab.categories));
    }
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%03d", i);
    ImageEntry e;
    e.name = name;
    e.features = output_dir / (e.name + "_features.ovrt");
    e.proposal_masks = output_dir / (e.name + "_masks.ovrt");
    e.proposal_logits = output_dir / (e.name + "_logits.ovrt");
    e.ground_truth = PanopticPaths{output_dir / (e.name + "_gt.png"),
                                   output_dir / (e.name + "_gt.json")};
    WriteTensor(ToTensor(scene.features, DType::kFloat64), e.features);
    WriteTensor(ToTensor(scene.proposals.masks, DType::kFloat64),
                e.proposal_masks);
    WriteTensor(ToTensor(scene.proposals.train_logits, DType::kFloat64),
                e.proposal_logits);
    WritePanoptic(scene.gt, scene.vocab.categories, *e.ground_truth);
    m.images.push_back(std::move(e));
  }
  WriteTextFile(output_dir / "manifest.json",
                ManifestToJson(m, output_dir, /*absolute=*/false));
  return m;
}

}  // namespace coatseg::cli
