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


#include "coatseg/hungarian.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coatseg/error.h"
#include "coatseg/losses.h"

namespace coatseg {
namespace {

// Solves the n <= m case; returns col_of_row.
std::vector<int> SolveRowsLeqCols(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based with a virtual column 0, following the classic formulation.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> row_of(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = row_of[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (row_of[j] != 0) col_of[row_of[j] - 1] = static_cast<int>(j - 1);
  }
  return col_of;
}

Matrix Transposed(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  }
  return t;
}

}  // namespace

Assignment Hungarian(const Matrix& cost) {
  Assignment out;
  if (cost.rows() == 0 || cost.cols() == 0) return out;
  for (double c : cost.data()) {
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::kInvalidArgument, "assignment costs must be finite");
    }
  }
  if (cost.rows() <= cost.cols()) {
    const auto col_of = SolveRowsLeqCols(cost);
    for (std::size_t r = 0; r < col_of.size(); ++r) {
      out.pairs.emplace_back(static_cast<int>(r), col_of[r]);
    }
  } else {
    const auto row_of = SolveRowsLeqCols(Transposed(cost));
    for (std::size_t c = 0; c < row_of.size(); ++c) {
      out.pairs.emplace_back(row_of[c], static_cast<int>(c));
    }
    std::sort(out.pairs.begin(), out.pairs.end());
  }
  for (const auto& [r, c] : out.pairs) out.total_cost += cost(r, c);
  return out;
}

std::vector<std::uint8_t> SegmentMask(const PanopticMap& gt, std::uint32_t id) {
  std::vector<std::uint8_t> mask(gt.pixels());
  for (std::size_t p = 0; p < mask.size(); ++p) {
    mask[p] = gt.segment_ids[p] == id ? 1 : 0;
  }
  return mask;
}

Matrix MatchCost(const MaskLogits& masks,
                 std::span<const ClassDistribution> dists,
                 const PanopticMap& gt, const LossConfig& cfg) {
  if (dists.size() != static_cast<std::size_t>(masks.count)) {
    throw Error(ErrorCode::kShape, "one distribution per mask is required");
  }
  if (masks.count > 0 &&
      (masks.height != gt.height || masks.width != gt.width)) {
    throw Error(ErrorCode::kShape, "mask and ground-truth sizes differ");
  }
  const auto pixels = SamplePixels(gt.pixels(), cfg);
  Matrix cost(masks.count, gt.segments.size());
  for (std::size_t j = 0; j < gt.segments.size(); ++j) {
    const Segment& seg = gt.segments[j];
    const auto gt_mask = SegmentMask(gt, seg.id);
    for (int i = 0; i < masks.count; ++i) {
      const auto& p = dists[i].probs;
      if (seg.category < 0 ||
          static_cast<std::size_t>(seg.category) + 1 >= p.size()) {
        throw Error(ErrorCode::kShape,
                    "ground-truth category " + std::to_string(seg.category) +
                        " outside the distribution");
      }
      double c = cfg.w_cls * (1.0 - p[seg.category]);
      if (cfg.w_dice != 0.0 || cfg.w_mask != 0.0) {
        const auto [pred, target] =
            GatherPixels(masks.mask(i), gt_mask, pixels);
        if (cfg.w_dice != 0.0) c += cfg.w_dice * DiceLoss(pred, target).value;
        if (cfg.w_mask != 0.0) c += cfg.w_mask * MaskBceLoss(pred, target).value;
      }
      cost(i, j) = c;
    }
  }
  return cost;
}

}  // namespace coatseg
