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


// Training objective for mask-to-text refinement:
//
//   total = alpha_cls * l_cls + l_m2f_cls + w_mask * l_m2f_mask
//           + w_dice * l_m2f_dice
//
// l_cls supervises the pooled-feature/text classifier of matched proposals;
// the l_m2f_* terms are the mask-transformer loss (class cross entropy with
// void targets for unmatched proposals, per-pixel BCE and dice on matched
// masks). Matching is Hungarian on MatchCost.

#ifndef COATSEG_LOSSES_H_
#define COATSEG_LOSSES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "coatseg/hungarian.h"
#include "coatseg/types.h"

namespace coatseg {

struct LossConfig {
  double alpha_cls = 0.1;
  double w_cls = 2.0;
  double w_mask = 5.0;
  double w_dice = 5.0;
  double void_weight = 0.1;  // weight of void targets in l_m2f_cls
  // 0 means dense (every pixel); otherwise this many pixels are sampled
  // uniformly with replacement from a fixed-seed stream.
  int point_sample_count = 0;
};

void CheckConfig(const LossConfig& cfg);

struct LossBreakdown {
  double l_cls = 0.0;
  double l_m2f_cls = 0.0;
  double l_m2f_mask = 0.0;
  double l_m2f_dice = 0.0;
  double total = 0.0;
};

double CombineLoss(const LossBreakdown& parts, const LossConfig& cfg);

struct VectorLoss {
  double value = 0.0;
  std::vector<double> grad;
};

struct MatrixLoss {
  double value = 0.0;
  Matrix grad;
};

// Mean over rows of -log softmax(logits)[target]; gradient is
// (softmax - one_hot) / rows. An empty matrix yields 0.
MatrixLoss CrossEntropyLoss(const Matrix& logits, std::span<const int> targets);

// 1 - (2 * sum(s * g) + 1) / (sum(s) + sum(g) + 1), s = sigmoid(logits).
VectorLoss DiceLoss(std::span<const double> logits,
                    std::span<const std::uint8_t> target);

// Mean per-pixel binary cross entropy on logits.
VectorLoss MaskBceLoss(std::span<const double> logits,
                       std::span<const std::uint8_t> target);

// Pixel indices the mask losses are evaluated on (all of them when dense).
std::vector<std::size_t> SamplePixels(std::size_t pixels, const LossConfig& cfg);

std::pair<std::vector<double>, std::vector<std::uint8_t>> GatherPixels(
    std::span<const double> logits, std::span<const std::uint8_t> target,
    std::span<const std::size_t> indices);

struct CombinedLossResult {
  LossBreakdown breakdown;
  Assignment matching;  // (proposal, gt segment index)
};

// `clip_logits` is N x N_cls (the pooled-feature/text logits); proposal
// train_logits must be N x (N_cls + 1) over the same vocabulary as gt.
CombinedLossResult CombinedLoss(const ProposalSet& proposals,
                                const Matrix& clip_logits,
                                const PanopticMap& gt,
                                const LossConfig& cfg);

}  // namespace coatseg

#endif  // COATSEG_LOSSES_H_
