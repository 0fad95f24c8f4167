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


// Turns per-mask class distributions and mask logits into image-level
// outputs, following the Mask2Former inference convention.

#ifndef COATSEG_FUSION_H_
#define COATSEG_FUSION_H_

#include <span>
#include <vector>

#include "coatseg/types.h"

namespace coatseg {

struct FusionConfig {
  double score_threshold = 0.8;
  double overlap_keep_ratio = 0.8;
  double binarize_threshold = 0.5;  // on sigmoid probability
  bool merge_stuff = true;
};

void CheckConfig(const FusionConfig& cfg);

struct Candidate {
  int proposal = 0;
  int category = 0;
  double score = 0.0;
};

// Per proposal: best non-void category and its probability. Drops proposals
// scoring below the threshold or whose overall argmax is void, and returns
// the rest sorted by descending score (ties by lower proposal index).
std::vector<Candidate> SelectCandidates(std::span<const ClassDistribution> dists,
                                        const FusionConfig& cfg);

// Panoptic map from the surviving candidates. Each pixel goes to the
// candidate maximizing score * sigmoid(logit) among those whose sigmoid
// exceeds the binarization threshold. Segments keeping less than
// overlap_keep_ratio of their binarized area are dropped, and stuff segments
// of one category are merged. Output ids are 1..n in score order.
PanopticMap PanopticInference(const MaskLogits& masks,
                              std::span<const ClassDistribution> dists,
                              std::span<const Category> categories,
                              const FusionConfig& cfg);

struct SemanticResult {
  int height = 0;
  int width = 0;
  int num_categories = 0;
  std::vector<int> category_map;  // H * W
  std::vector<double> scores;     // H * W * num_categories
  // Set when there were no proposals: every score is zero and the category
  // map defaults to 0.
  bool all_zero = false;

  double score(int r, int c, int k) const {
    return scores[(static_cast<std::size_t>(r) * width + c) * num_categories +
                  k];
  }
};

// score(u, v, c) = sum_i sigmoid(mask_i(u, v)) * dist_i(c) over non-void c;
// no proposal is discarded.
SemanticResult SemanticInference(const MaskLogits& masks,
                                 std::span<const ClassDistribution> dists,
                                 int num_categories);

}  // namespace coatseg

#endif  // COATSEG_FUSION_H_
