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


// coatseg: run open-vocabulary panoptic inference with objectness adjustment
// on serialized model outputs, evaluate panoptic predictions, sweep the trust
// factor, and generate synthetic fixtures.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coatseg/error.h"
#include "commands.h"

namespace {

namespace fs = std::filesystem;
using namespace coatseg;

void AddOverrideFlags(CLI::App* cmd, cli::Overrides& o) {
  cmd->add_option("--gamma", o.gamma, "CLIP trust factor in [0, 1]");
  cmd->add_flag("--disable-coat", o.disable_coat,
                "skip the objectness adjustment");
  cmd->add_option("--alpha-seen", o.alpha_seen,
                  "ensemble exponent for seen categories");
  cmd->add_option("--beta-unseen", o.beta_unseen,
                  "ensemble exponent for unseen categories");
  cmd->add_option("--logit-scale", o.logit_scale,
                  "scale applied to cosine similarities");
  cmd->add_option("--score-threshold", o.score_threshold,
                  "minimum mask score kept by panoptic fusion");
}

cli::RunManifest LoadWithOverrides(const std::string& path,
                                   const cli::Overrides& o) {
  cli::RunManifest m = cli::LoadManifest(path);
  cli::ApplyOverrides(o, m.config);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open-vocabulary panoptic inference and evaluation"};
  app.require_subcommand(1);

  cli::Overrides overrides;
  std::string manifest_path;
  std::string output_dir = "coatseg_out";
  int jobs = 1;

  auto* run = app.add_subcommand("run", "run inference over a manifest");
  run->add_option("manifest", manifest_path, "run manifest (JSON)")->required();
  run->add_option("--output-dir", output_dir, "where panoptic outputs go");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  AddOverrideFlags(run, overrides);

  auto* oracle = app.add_subcommand(
      "oracle-eval", "classify ground-truth masks and report panoptic quality");
  oracle->add_option("manifest", manifest_path, "run manifest (JSON)")->required();
  oracle->add_option("--output-dir", output_dir, "where panoptic outputs go");
  oracle->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  AddOverrideFlags(oracle, overrides);

  std::vector<double> gammas;
  auto* sweep = app.add_subcommand("sweep-gamma",
                                   "panoptic quality as a function of gamma");
  sweep->add_option("manifest", manifest_path, "run manifest (JSON)")->required();
  sweep->add_option("--gammas", gammas, "trust factors (default 0, 0.1, ..., 1)")
      ->delimiter(',');
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  AddOverrideFlags(sweep, overrides);

  PanopticPaths pred, gt;
  std::string semantic_pred;
  auto* eval = app.add_subcommand("eval", "evaluate a panoptic prediction");
  eval->add_option("--pred-png", pred.png, "predicted raster")->required();
  eval->add_option("--pred-json", pred.json, "predicted sidecar")->required();
  eval->add_option("--gt-png", gt.png, "ground-truth raster")->required();
  eval->add_option("--gt-json", gt.json, "ground-truth sidecar")->required();
  eval->add_option("--semantic-pred", semantic_pred,
                   "OVRT H x W category map for mIoU");

  std::string spec_path;
  int count = 1;
  std::optional<std::uint64_t> seed;
  auto* synth = app.add_subcommand("synth", "generate synthetic fixtures");
  synth->add_option("spec", spec_path, "scene spec (JSON)")->required();
  synth->add_option("--output-dir", output_dir, "fixture directory");
  synth->add_option("--count", count, "number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "override the spec seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (run->parsed() || oracle->parsed()) {
      const cli::RunManifest m = LoadWithOverrides(manifest_path, overrides);
      const cli::RunResult r = cli::Run(m, {jobs, oracle->parsed()});
      cli::WriteRunOutputs(m, r, output_dir);
      if (r.report) {
        const auto categories = ParseVocabularyJson(ReadTextFile(m.metadata));
        std::cout << cli::ReportToJson(*r.report, categories);
      } else {
        std::cout << "wrote " << r.panoptic.size() << " panoptic maps to "
                  << output_dir << "\n";
      }
    } else if (sweep->parsed()) {
      if (gammas.empty()) {
        for (int i = 0; i <= 10; ++i) gammas.push_back(i / 10.0);
      }
      const cli::RunManifest m = LoadWithOverrides(manifest_path, overrides);
      std::cout << cli::SweepToCsv(cli::SweepGamma(m, gammas, jobs));
    } else if (eval->parsed()) {
      std::optional<fs::path> sem;
      if (!semantic_pred.empty()) sem = semantic_pred;
      const cli::EvalResult r = cli::Eval(pred, gt, sem);
      std::cout << cli::ReportToJson(r.report, r.vocabulary, r.miou);
    } else if (synth->parsed()) {
      SceneSpec spec = SceneSpecFromJson(ReadTextFile(spec_path));
      if (seed) spec.seed = *seed;
      const cli::RunManifest m = cli::Synthesize(spec, count, output_dir);
      std::cout << cli::ManifestToJson(m, output_dir, /*absolute=*/true);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << ErrorCodeName(e.code()) << ": " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
