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


#include "coatseg/pipeline.h"

#include <string>

#include "coatseg/classify.h"
#include "coatseg/error.h"

namespace coatseg {

Classification ClassifyProposals(const ProposalSet& proposals,
                                 const FeatureMap& features,
                                 const VocabularyEmbedding& vocab,
                                 const PipelineConfig& cfg) {
  if (proposals.count() > 0 &&
      proposals.train_logits.cols() != vocab.size() + 1) {
    throw Error(ErrorCode::kShape,
                "proposal logits have " +
                    std::to_string(proposals.train_logits.cols()) +
                    " columns, vocabulary needs " +
                    std::to_string(vocab.size() + 1));
  }
  Classification out;
  out.scores = ApplyCoat(proposals, features, vocab, cfg.coat, cfg.ensemble,
                         cfg.fusion.binarize_threshold);
  out.dists.reserve(out.scores.size());
  for (std::size_t i = 0; i < out.scores.size(); ++i) {
    const auto p_in = InVocabularyProbs(proposals.train_logits.row(i));
    const auto p_ens =
        EnsembleProbs(p_in, out.scores[i].p_clip, vocab, cfg.ensemble);
    out.dists.push_back(
        ComposeClassDistribution(p_ens, out.scores[i].p_obj_after));
  }
  return out;
}

InferenceResult RunInference(const ProposalSet& proposals,
                             const FeatureMap& features,
                             const VocabularyEmbedding& vocab,
                             const PipelineConfig& cfg) {
  InferenceResult out;
  out.classification = ClassifyProposals(proposals, features, vocab, cfg);
  if (proposals.count() == 0) {
    out.panoptic = PanopticMap::AllVoid(features.height, features.width);
    return out;
  }
  out.panoptic = PanopticInference(proposals.masks, out.classification.dists,
                                   vocab.categories, cfg.fusion);
  return out;
}

}  // namespace coatseg
