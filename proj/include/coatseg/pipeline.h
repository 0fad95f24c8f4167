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


// End-to-end inference for one image: COAT-adjusted objectness, ensembled
// vocabulary probabilities, the objectness gate, then panoptic fusion.

#ifndef COATSEG_PIPELINE_H_
#define COATSEG_PIPELINE_H_

#include <vector>

#include "coatseg/coat.h"
#include "coatseg/fusion.h"
#include "coatseg/losses.h"
#include "coatseg/types.h"

namespace coatseg {

struct PipelineConfig {
  CoatConfig coat;
  EnsembleConfig ensemble;
  FusionConfig fusion;
  LossConfig loss;
};

struct Classification {
  std::vector<ProposalScores> scores;
  std::vector<ClassDistribution> dists;
};

// Proposal train_logits must cover the vocabulary plus void (N_cls + 1
// columns); their non-void softmax is the in-vocabulary prediction.
Classification ClassifyProposals(const ProposalSet& proposals,
                                 const FeatureMap& features,
                                 const VocabularyEmbedding& vocab,
                                 const PipelineConfig& cfg);

struct InferenceResult {
  Classification classification;
  PanopticMap panoptic;
};

InferenceResult RunInference(const ProposalSet& proposals,
                             const FeatureMap& features,
                             const VocabularyEmbedding& vocab,
                             const PipelineConfig& cfg);

}  // namespace coatseg

#endif  // COATSEG_PIPELINE_H_
