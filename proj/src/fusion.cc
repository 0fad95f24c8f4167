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


#include "coatseg/fusion.h"

#include <algorithm>
#include <map>
#include <string>

#include "coatseg/error.h"

namespace coatseg {

void CheckConfig(const FusionConfig& cfg) {
  if (!(cfg.score_threshold >= 0.0)) {
    throw Error(ErrorCode::kRange, "score_threshold must be >= 0");
  }
  if (!(cfg.overlap_keep_ratio >= 0.0 && cfg.overlap_keep_ratio <= 1.0)) {
    throw Error(ErrorCode::kRange, "overlap_keep_ratio must lie in [0, 1]");
  }
  if (!(cfg.binarize_threshold >= 0.0 && cfg.binarize_threshold < 1.0)) {
    throw Error(ErrorCode::kRange, "binarize_threshold must lie in [0, 1)");
  }
}

std::vector<Candidate> SelectCandidates(std::span<const ClassDistribution> dists,
                                        const FusionConfig& cfg) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto& p = dists[i].probs;
    if (p.size() < 2) {
      throw Error(ErrorCode::kShape, "distribution " + std::to_string(i) +
                                         " has no category entries");
    }
    const auto best = std::max_element(p.begin(), p.end() - 1);
    const double score = *best;
    if (score < cfg.score_threshold || p.back() > score) continue;
    out.push_back({static_cast<int>(i), static_cast<int>(best - p.begin()),
                   score});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score > b.score;
                   });
  return out;
}

PanopticMap PanopticInference(const MaskLogits& masks,
                              std::span<const ClassDistribution> dists,
                              std::span<const Category> categories,
                              const FusionConfig& cfg) {
  CheckConfig(cfg);
  if (dists.size() != static_cast<std::size_t>(masks.count)) {
    throw Error(ErrorCode::kShape,
                std::to_string(dists.size()) + " distributions for " +
                    std::to_string(masks.count) + " masks");
  }
  PanopticMap out = PanopticMap::AllVoid(masks.height, masks.width);
  const std::vector<Candidate> cands = SelectCandidates(dists, cfg);
  for (const Candidate& c : cands) {
    if (static_cast<std::size_t>(c.category) >= categories.size()) {
      throw Error(ErrorCode::kShape, "distribution covers more categories "
                                     "than the vocabulary");
    }
  }
  const std::size_t pixels = masks.pixels();

  // slot[p] = index into `cands` owning pixel p, or -1.
  std::vector<int> slot(pixels, -1);
  std::vector<std::size_t> binarized_area(cands.size(), 0);
  std::vector<std::size_t> assigned_area(cands.size(), 0);
  std::vector<double> best(pixels, 0.0);
  std::vector<int> best_proposal(pixels, -1);
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const auto logits = masks.mask(cands[k].proposal);
    for (std::size_t p = 0; p < pixels; ++p) {
      const double prob = Sigmoid(logits[p]);
      if (!(prob > cfg.binarize_threshold)) continue;
      ++binarized_area[k];
      const double v = cands[k].score * prob;
      if (slot[p] < 0 || v > best[p] ||
          (v == best[p] && cands[k].proposal < best_proposal[p])) {
        slot[p] = static_cast<int>(k);
        best[p] = v;
        best_proposal[p] = cands[k].proposal;
      }
    }
  }
  for (std::size_t p = 0; p < pixels; ++p) {
    if (slot[p] >= 0) ++assigned_area[slot[p]];
  }

  // Area filter, then stuff merging. `target[k]` is the candidate whose
  // segment absorbs candidate k, or -1 if k is dropped.
  std::vector<int> target(cands.size(), -1);
  std::map<int, int> stuff_owner;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (assigned_area[k] == 0 ||
        static_cast<double>(assigned_area[k]) <
            cfg.overlap_keep_ratio * static_cast<double>(binarized_area[k])) {
      continue;
    }
    const int cat = cands[k].category;
    if (cfg.merge_stuff && !categories[cat].thing) {
      auto [it, inserted] = stuff_owner.emplace(cat, static_cast<int>(k));
      target[k] = it->second;
    } else {
      target[k] = static_cast<int>(k);
    }
  }
  std::vector<std::uint32_t> id_of(cands.size(), 0);
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (target[k] != static_cast<int>(k)) continue;
    const auto id = static_cast<std::uint32_t>(out.segments.size() + 1);
    id_of[k] = id;
    out.segments.push_back(
        {id, cands[k].category, categories[cands[k].category].thing});
  }
  for (std::size_t p = 0; p < pixels; ++p) {
    if (slot[p] < 0) continue;
    const int t = target[slot[p]];
    out.segment_ids[p] = t < 0 ? 0 : id_of[t];
  }
  return out;
}

SemanticResult SemanticInference(const MaskLogits& masks,
                                 std::span<const ClassDistribution> dists,
                                 int num_categories) {
  if (dists.size() != static_cast<std::size_t>(masks.count)) {
    throw Error(ErrorCode::kShape,
                std::to_string(dists.size()) + " distributions for " +
                    std::to_string(masks.count) + " masks");
  }
  if (num_categories < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_categories must be >= 1");
  }
  for (const auto& d : dists) {
    if (d.probs.size() != static_cast<std::size_t>(num_categories) + 1) {
      throw Error(ErrorCode::kShape,
                  "distribution size does not match num_categories + 1");
    }
  }
  SemanticResult out;
  out.height = masks.height;
  out.width = masks.width;
  out.num_categories = num_categories;
  out.all_zero = masks.count == 0;
  const std::size_t pixels = masks.pixels();
  out.scores.assign(pixels * num_categories, 0.0);
  out.category_map.assign(pixels, 0);
  for (int i = 0; i < masks.count; ++i) {
    const auto logits = masks.mask(i);
    const auto& probs = dists[i].probs;
    for (std::size_t p = 0; p < pixels; ++p) {
      const double m = Sigmoid(logits[p]);
      double* s = out.scores.data() + p * num_categories;
      for (int c = 0; c < num_categories; ++c) s[c] += m * probs[c];
    }
  }
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* s = out.scores.data() + p * num_categories;
    out.category_map[p] =
        static_cast<int>(std::max_element(s, s + num_categories) - s);
  }
  return out;
}

}  // namespace coatseg
