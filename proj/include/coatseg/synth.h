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


// Deterministic synthetic scenes for tests and experiments.
//
// A scene is a ground-truth panoptic map, a feature map in which every pixel
// of a segment holds its category's text embedding plus Gaussian noise, and
// one proposal per segment whose training logits carry the correct category
// and a void logit that is raised for unseen categories (the objectness bias
// COAT corrects). Everything is a pure function of the SceneSpec.

#ifndef COATSEG_SYNTH_H_
#define COATSEG_SYNTH_H_

#include <cstdint>
#include <optional>
#include <string>

#include "coatseg/types.h"

namespace coatseg {

enum class SceneLayout { kRectangles, kVoronoi };

struct SceneSpec {
  int height = 64;
  int width = 64;
  int n_segments = 6;
  int vocab_size = 8;
  int embedding_dim = 16;
  double seen_fraction = 0.5;   // categories [0, round(f * K)) are seen
  double thing_fraction = 0.5;
  double feature_noise = 0.0;   // sigma of per-channel feature noise
  // Void-logit offsets by the category's seen flag.
  double void_bias_seen = 0.0;
  double void_bias_unseen = 0.0;
  double category_logit = 6.0;  // correct-category training logit
  double void_logit = 1.0;      // base void logit
  double logit_noise = 0.0;     // sigma added to every training logit
  double mask_logit = 8.0;      // +inside / -outside
  double mask_noise = 0.0;
  // Fraction of segments whose proposal is replaced by a fragment covering
  // 40% of the segment, with void logit `fragment_void_logit`.
  double miss_fraction = 0.0;
  double fragment_void_logit = 6.2;
  SceneLayout layout = SceneLayout::kRectangles;
  std::uint64_t seed = 0;
  // Seed of the vocabulary stream; defaults to `seed`. Scenes sharing a
  // vocabulary (one manifest) set this to a common value.
  std::optional<std::uint64_t> vocab_seed;
};

void CheckSpec(const SceneSpec& spec);

struct Scene {
  PanopticMap gt;
  FeatureMap features;
  ProposalSet proposals;
  VocabularyEmbedding vocab;
};

// Throws kPacking when the segments do not fit the image.
Scene GenerateScene(const SceneSpec& spec);

// One saturated proposal per ground-truth segment, in segment order, with
// uniform (uninformative) training logits over num_categories + 1 entries.
ProposalSet OracleMasks(const PanopticMap& gt, int num_categories,
                        double saturation = 20.0);

std::string SceneSpecToJson(const SceneSpec& spec);
SceneSpec SceneSpecFromJson(const std::string& text);

}  // namespace coatseg

#endif  // COATSEG_SYNTH_H_
