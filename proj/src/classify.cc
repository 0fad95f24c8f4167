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


#include "coatseg/classify.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "coatseg/error.h"

namespace coatseg {

PooledFeature MaskPool(const FeatureMap& f,
                       std::span<const std::uint8_t> mask) {
  const std::size_t pixels = static_cast<std::size_t>(f.height) * f.width;
  if (mask.size() != pixels) {
    throw Error(ErrorCode::kShape,
                "mask has " + std::to_string(mask.size()) +
                    " pixels, feature map has " + std::to_string(pixels));
  }
  PooledFeature out;
  out.values.assign(f.dim, 0.0);
  const double* src = f.values.data();
  for (std::size_t p = 0; p < pixels; ++p, src += f.dim) {
    if (!mask[p]) continue;
    ++out.source_mask_area;
    for (int k = 0; k < f.dim; ++k) out.values[k] += src[k];
  }
  if (out.source_mask_area == 0) {
    throw Error(ErrorCode::kEmptyMask, "mask has no active pixels");
  }
  const double area = static_cast<double>(out.source_mask_area);
  for (double& v : out.values) v /= area;
  return out;
}

std::vector<double> ClipLogits(const PooledFeature& pooled,
                               const VocabularyEmbedding& vocab,
                               double logit_scale) {
  if (pooled.values.size() != vocab.dim()) {
    throw Error(ErrorCode::kShape,
                "pooled feature has dim " +
                    std::to_string(pooled.values.size()) +
                    ", vocabulary embeddings have dim " +
                    std::to_string(vocab.dim()));
  }
  double sq = 0.0;
  for (double v : pooled.values) sq += v * v;
  if (!(sq > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "pooled feature has zero norm");
  }
  const double inv_norm = 1.0 / std::sqrt(sq);
  std::vector<double> logits(vocab.size());
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    auto e = vocab.embeddings.row(c);
    double dot = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) dot += pooled.values[k] * e[k];
    logits[c] = logit_scale * dot * inv_norm;
  }
  return logits;
}

std::vector<double> ClipClassProbs(const PooledFeature& pooled,
                                   const VocabularyEmbedding& vocab,
                                   double logit_scale) {
  return Softmax(ClipLogits(pooled, vocab, logit_scale));
}

std::vector<double> EnsembleProbs(std::span<const double> p_in,
                                  std::span<const double> p_clip,
                                  const VocabularyEmbedding& vocab,
                                  const EnsembleConfig& cfg) {
  if (p_in.size() != vocab.size() || p_clip.size() != vocab.size()) {
    throw Error(ErrorCode::kShape,
                "ensemble inputs must both cover the " +
                    std::to_string(vocab.size()) + "-category vocabulary");
  }
  std::vector<double> out(p_in.size());
  double total = 0.0;
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double w =
        vocab.categories[c].seen ? cfg.alpha_seen : cfg.beta_unseen;
    // pow(0, 0) == 1 keeps the exponent-0 and exponent-1 identities exact.
    out[c] = std::pow(p_in[c], 1.0 - w) * std::pow(p_clip[c], w);
    total += out[c];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kDegenerate,
                "ensemble normalizer is zero for every category");
  }
  for (double& v : out) v /= total;
  return out;
}

ClassDistribution ComposeClassDistribution(std::span<const double> p_ens,
                                           double p_obj) {
  if (!(p_obj >= 0.0 && p_obj <= 1.0)) {
    throw Error(ErrorCode::kRange,
                "p_obj must lie in [0, 1], got " + std::to_string(p_obj));
  }
  ClassDistribution d;
  d.probs.reserve(p_ens.size() + 1);
  for (double p : p_ens) d.probs.push_back(p * p_obj);
  d.probs.push_back(1.0 - p_obj);
  return d;
}

double ObjectnessFromLogits(std::span<const double> train_logits) {
  if (train_logits.size() < 2) {
    throw Error(ErrorCode::kShape,
                "training logits need a category and the void entry");
  }
  // Ratio of non-void mass to total mass; stays accurate when p_obj is tiny.
  const double m = *std::max_element(train_logits.begin(), train_logits.end());
  double fg = 0.0;
  for (std::size_t i = 0; i + 1 < train_logits.size(); ++i) {
    fg += std::exp(train_logits[i] - m);
  }
  const double total = fg + std::exp(train_logits.back() - m);
  return std::clamp(fg / total, 0.0, 1.0);
}

std::vector<double> InVocabularyProbs(std::span<const double> train_logits) {
  if (train_logits.size() < 2) {
    throw Error(ErrorCode::kShape,
                "training logits need a category and the void entry");
  }
  return Softmax(train_logits.first(train_logits.size() - 1));
}

std::vector<std::uint8_t> BinarizeMask(std::span<const double> logits,
                                       double threshold) {
  std::vector<std::uint8_t> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = Sigmoid(logits[i]) > threshold ? 1 : 0;
  }
  return out;
}

}  // namespace coatseg
