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


#include "coatseg/coat.h"

#include <algorithm>
#include <string>

#include "coatseg/classify.h"
#include "coatseg/error.h"

namespace coatseg {
namespace {

bool InUnitInterval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

double Certainty(std::span<const double> p_clip) {
  if (p_clip.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "certainty of an empty vocabulary");
  }
  return *std::max_element(p_clip.begin(), p_clip.end());
}

CoatDecision AdjustObjectness(double p_obj, double p_cer, double gamma) {
  if (!InUnitInterval(p_obj) || !InUnitInterval(p_cer) ||
      !InUnitInterval(gamma)) {
    throw Error(ErrorCode::kRange,
                "p_obj, p_cer and gamma must lie in [0, 1] (got " +
                    std::to_string(p_obj) + ", " + std::to_string(p_cer) +
                    ", " + std::to_string(gamma) + ")");
  }
  // g + (1 - g) * p_obj: exact at gamma = 0 and monotone in p_obj under
  // rounding.
  const double g = gamma * p_cer;
  const double after = std::min(1.0, g + (1.0 - g) * p_obj);
  return {p_obj, p_cer, after, gamma};
}

std::vector<ProposalScores> ApplyCoat(const ProposalSet& proposals,
                                      const FeatureMap& features,
                                      const VocabularyEmbedding& vocab,
                                      const CoatConfig& coat,
                                      const EnsembleConfig& ensemble,
                                      double binarize_threshold) {
  CheckConfig(coat);
  CheckConfig(ensemble);
  const MaskLogits& masks = proposals.masks;
  if (masks.count > 0 &&
      (masks.height != features.height || masks.width != features.width)) {
    throw Error(ErrorCode::kShape,
                "proposal masks are " + std::to_string(masks.height) + "x" +
                    std::to_string(masks.width) + " but features are " +
                    std::to_string(features.height) + "x" +
                    std::to_string(features.width));
  }
  if (static_cast<std::size_t>(features.dim) != vocab.dim()) {
    throw Error(ErrorCode::kShape,
                "feature dim " + std::to_string(features.dim) +
                    " differs from embedding dim " +
                    std::to_string(vocab.dim()));
  }
  if (proposals.train_logits.rows() != static_cast<std::size_t>(masks.count)) {
    throw Error(ErrorCode::kShape,
                "train_logits rows do not match the proposal count");
  }

  std::vector<ProposalScores> out(masks.count);
  const std::vector<double> uniform(vocab.size(),
                                    1.0 / static_cast<double>(vocab.size()));
  for (int i = 0; i < masks.count; ++i) {
    ProposalScores& s = out[i];
    s.p_obj_before = ObjectnessFromLogits(proposals.train_logits.row(i));
    s.p_obj_after = s.p_obj_before;
    const auto binary = BinarizeMask(masks.mask(i), binarize_threshold);
    if (std::none_of(binary.begin(), binary.end(),
                     [](std::uint8_t b) { return b != 0; })) {
      s.p_clip = uniform;
      s.p_cer = Certainty(s.p_clip);
      continue;
    }
    const PooledFeature pooled = MaskPool(features, binary);
    if (std::all_of(pooled.values.begin(), pooled.values.end(),
                    [](double v) { return v == 0.0; })) {
      // Zero-norm pooled feature: no direction to classify.
      s.p_clip = uniform;
      s.p_cer = Certainty(s.p_clip);
      continue;
    }
    s.p_clip = ClipClassProbs(pooled, vocab, ensemble.logit_scale);
    s.p_cer = Certainty(s.p_clip);
    s.pooled = true;
    if (coat.enabled) {
      s.p_obj_after = AdjustObjectness(s.p_obj_before, s.p_cer, coat.gamma)
                          .p_obj_after;
    }
  }
  return out;
}

}  // namespace coatseg
