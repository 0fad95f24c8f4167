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


// CLIP-conditioned objectness adjustment (COAT).
//
// The mask transformer's objectness p_obj is biased against categories that
// were absent from its training vocabulary. COAT raises it using the
// vision-language classifier's certainty p_cer (the maximum of the pooled
// mask's vocabulary distribution):
//
//   p_obj' = 1 - (1 - gamma * p_cer) * (1 - p_obj)
//          = p_obj + gamma * p_cer * (1 - p_obj)
//
// so the boost never exceeds gamma * p_cer and p_obj' >= p_obj always.

#ifndef COATSEG_COAT_H_
#define COATSEG_COAT_H_

#include <span>
#include <vector>

#include "coatseg/types.h"

namespace coatseg {

struct CoatDecision {
  double p_obj_before = 0.0;
  double p_cer = 0.0;
  double p_obj_after = 0.0;
  double gamma = 0.0;
};

// Maximum entry of a vocabulary distribution.
double Certainty(std::span<const double> p_clip);

CoatDecision AdjustObjectness(double p_obj, double p_cer, double gamma);

struct ProposalScores {
  double p_obj_before = 0.0;
  double p_obj_after = 0.0;
  double p_cer = 0.0;
  std::vector<double> p_clip;
  // False when the binarized mask was empty and the proposal skipped COAT.
  bool pooled = false;
};

// Pools every proposal's binarized mask (Sigmoid > binarize_threshold) over
// `features`, classifies it against `vocab`, and applies the objectness
// adjustment when `coat.enabled`. Empty masks keep their objectness and get a
// uniform p_clip. Throws kShape on dimension mismatches.
std::vector<ProposalScores> ApplyCoat(const ProposalSet& proposals,
                                      const FeatureMap& features,
                                      const VocabularyEmbedding& vocab,
                                      const CoatConfig& coat,
                                      const EnsembleConfig& ensemble,
                                      double binarize_threshold = 0.5);

}  // namespace coatseg

#endif  // COATSEG_COAT_H_
