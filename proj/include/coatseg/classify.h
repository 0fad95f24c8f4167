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


// Per-mask open-vocabulary classification: mask pooling over dense image
// features, cosine-softmax against text embeddings, the seen/unseen geometric
// ensemble with the in-vocabulary classifier, and the objectness gate.

#ifndef COATSEG_CLASSIFY_H_
#define COATSEG_CLASSIFY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "coatseg/types.h"

namespace coatseg {

struct PooledFeature {
  std::vector<double> values;
  std::size_t source_mask_area = 0;
};

// Mean of the feature vectors over the active pixels of `mask` (H * W bytes,
// nonzero = active). Throws kEmptyMask when no pixel is active.
PooledFeature MaskPool(const FeatureMap& f, std::span<const std::uint8_t> mask);

// logit_scale * cos(pooled, embedding_c) for every category.
std::vector<double> ClipLogits(const PooledFeature& pooled,
                               const VocabularyEmbedding& vocab,
                               double logit_scale);

// Softmax of ClipLogits. Throws kDegenerate on a zero-norm pooled feature.
std::vector<double> ClipClassProbs(const PooledFeature& pooled,
                                   const VocabularyEmbedding& vocab,
                                   double logit_scale);

// p_ens(c) proportional to p_in(c)^(1 - w_c) * p_clip(c)^w_c with
// w_c = alpha_seen for seen categories and beta_unseen otherwise.
std::vector<double> EnsembleProbs(std::span<const double> p_in,
                                  std::span<const double> p_clip,
                                  const VocabularyEmbedding& vocab,
                                  const EnsembleConfig& cfg);

// [p_ens * p_obj, 1 - p_obj].
ClassDistribution ComposeClassDistribution(std::span<const double> p_ens,
                                           double p_obj);

// 1 - softmax(logits)[void], void being the last entry.
double ObjectnessFromLogits(std::span<const double> train_logits);

// Softmax over the non-void entries of a training-logit row.
std::vector<double> InVocabularyProbs(std::span<const double> train_logits);

// Pixels with Sigmoid(logit) > threshold, as a 0/1 byte mask.
std::vector<std::uint8_t> BinarizeMask(std::span<const double> logits,
                                       double threshold);

}  // namespace coatseg

#endif  // COATSEG_CLASSIFY_H_
