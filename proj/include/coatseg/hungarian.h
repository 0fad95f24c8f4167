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


// Minimum-cost bipartite assignment and the proposal-to-ground-truth cost
// used for training-target matching.

#ifndef COATSEG_HUNGARIAN_H_
#define COATSEG_HUNGARIAN_H_

#include <span>
#include <utility>
#include <vector>

#include "coatseg/types.h"

namespace coatseg {

struct LossConfig;

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

// O(n^2 m) shortest-augmenting-path solver with dual potentials. Returns
// min(n, m) pairs minimizing the summed cost. Throws kInvalidArgument on
// non-finite costs.
Assignment Hungarian(const Matrix& cost);

// Binary mask of one ground-truth segment, H * W bytes.
std::vector<std::uint8_t> SegmentMask(const PanopticMap& gt, std::uint32_t id);

// cost(i, j) = w_cls * (1 - p_i(category_j))
//            + w_dice * dice(mask_i, gt_j) + w_mask * bce(mask_i, gt_j).
// Columns follow gt.segments order.
Matrix MatchCost(const MaskLogits& masks,
                 std::span<const ClassDistribution> dists,
                 const PanopticMap& gt, const LossConfig& cfg);

}  // namespace coatseg

#endif  // COATSEG_HUNGARIAN_H_
