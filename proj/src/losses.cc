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


#include "coatseg/losses.h"

#include <cmath>
#include <string>

#include "coatseg/error.h"
#include "coatseg/random.h"

namespace coatseg {
namespace {

constexpr std::uint64_t kPointSampleSeed = 0x5EED;

void RequireSameSize(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kShape, "prediction has " + std::to_string(a) +
                                       " pixels, target has " +
                                       std::to_string(b));
  }
}

std::vector<ClassDistribution> TrainDistributions(const Matrix& train_logits) {
  std::vector<ClassDistribution> out(train_logits.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].probs = Softmax(train_logits.row(i));
  }
  return out;
}

}  // namespace

void CheckConfig(const LossConfig& cfg) {
  for (double w : {cfg.alpha_cls, cfg.w_cls, cfg.w_mask, cfg.w_dice,
                   cfg.void_weight}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kRange, "loss weights must be finite and >= 0");
    }
  }
  if (cfg.point_sample_count < 0) {
    throw Error(ErrorCode::kRange, "point_sample_count must be >= 0");
  }
}

double CombineLoss(const LossBreakdown& parts, const LossConfig& cfg) {
  return cfg.alpha_cls * parts.l_cls + parts.l_m2f_cls +
         cfg.w_mask * parts.l_m2f_mask + cfg.w_dice * parts.l_m2f_dice;
}

MatrixLoss CrossEntropyLoss(const Matrix& logits, std::span<const int> targets) {
  if (targets.size() != logits.rows()) {
    throw Error(ErrorCode::kShape, "one target per logit row is required");
  }
  MatrixLoss out{0.0, Matrix(logits.rows(), logits.cols())};
  if (logits.rows() == 0) return out;
  const double inv_rows = 1.0 / static_cast<double>(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const int t = targets[r];
    if (t < 0 || static_cast<std::size_t>(t) >= logits.cols()) {
      throw Error(ErrorCode::kRange, "target " + std::to_string(t) +
                                         " outside [0, " +
                                         std::to_string(logits.cols()) + ")");
    }
    const auto row = logits.row(r);
    out.value += LogSumExp(row) - row[t];
    const auto p = Softmax(row);
    auto g = out.grad.row(r);
    for (std::size_t c = 0; c < p.size(); ++c) {
      g[c] = (p[c] - (static_cast<int>(c) == t ? 1.0 : 0.0)) * inv_rows;
    }
  }
  out.value *= inv_rows;
  return out;
}

VectorLoss DiceLoss(std::span<const double> logits,
                    std::span<const std::uint8_t> target) {
  RequireSameSize(logits.size(), target.size());
  std::vector<double> s(logits.size());
  double inter = 0.0, sum_s = 0.0, sum_g = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    s[k] = Sigmoid(logits[k]);
    const double g = target[k] ? 1.0 : 0.0;
    inter += s[k] * g;
    sum_s += s[k];
    sum_g += g;
  }
  const double num = 2.0 * inter + 1.0;
  const double den = sum_s + sum_g + 1.0;
  VectorLoss out{1.0 - num / den, std::vector<double>(logits.size())};
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double g = target[k] ? 1.0 : 0.0;
    const double d_ds = -(2.0 * g * den - num) / (den * den);
    out.grad[k] = d_ds * s[k] * (1.0 - s[k]);
  }
  return out;
}

VectorLoss MaskBceLoss(std::span<const double> logits,
                       std::span<const std::uint8_t> target) {
  RequireSameSize(logits.size(), target.size());
  VectorLoss out{0.0, std::vector<double>(logits.size())};
  if (logits.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double x = logits[k];
    const double g = target[k] ? 1.0 : 0.0;
    out.value += std::max(x, 0.0) - x * g + std::log1p(std::exp(-std::abs(x)));
    out.grad[k] = (Sigmoid(x) - g) * inv_n;
  }
  out.value *= inv_n;
  return out;
}

std::vector<std::size_t> SamplePixels(std::size_t pixels, const LossConfig& cfg) {
  std::vector<std::size_t> idx;
  if (cfg.point_sample_count == 0) {
    idx.resize(pixels);
    for (std::size_t p = 0; p < pixels; ++p) idx[p] = p;
    return idx;
  }
  if (pixels == 0) return idx;
  CounterRng rng(kPointSampleSeed);
  idx.resize(cfg.point_sample_count);
  for (auto& p : idx) {
    p = static_cast<std::size_t>(rng.UniformInt(0, static_cast<int>(pixels) - 1));
  }
  return idx;
}

std::pair<std::vector<double>, std::vector<std::uint8_t>> GatherPixels(
    std::span<const double> logits, std::span<const std::uint8_t> target,
    std::span<const std::size_t> indices) {
  RequireSameSize(logits.size(), target.size());
  std::pair<std::vector<double>, std::vector<std::uint8_t>> out;
  out.first.reserve(indices.size());
  out.second.reserve(indices.size());
  for (std::size_t p : indices) {
    out.first.push_back(logits[p]);
    out.second.push_back(target[p]);
  }
  return out;
}

CombinedLossResult CombinedLoss(const ProposalSet& proposals,
                                const Matrix& clip_logits,
                                const PanopticMap& gt,
                                const LossConfig& cfg) {
  CheckConfig(cfg);
  const int n = proposals.count();
  const std::size_t n_cls = clip_logits.cols();
  if (clip_logits.rows() != static_cast<std::size_t>(n) ||
      proposals.train_logits.rows() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kShape, "logit rows must match the proposal count");
  }
  if (n > 0 && proposals.train_logits.cols() != n_cls + 1) {
    throw Error(ErrorCode::kShape,
                "train_logits must have one column per category plus void");
  }

  CombinedLossResult out;
  const auto dists = TrainDistributions(proposals.train_logits);
  if (n > 0 && !gt.segments.empty()) {
    out.matching =
        Hungarian(MatchCost(proposals.masks, dists, gt, cfg));
  }
  const auto& pairs = out.matching.pairs;
  LossBreakdown& b = out.breakdown;

  // Classification of matched proposals by the vision-language classifier.
  if (!pairs.empty()) {
    Matrix matched(pairs.size(), n_cls);
    std::vector<int> targets(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto src = clip_logits.row(pairs[k].first);
      std::copy(src.begin(), src.end(), matched.row(k).begin());
      targets[k] = gt.segments[pairs[k].second].category;
    }
    b.l_cls = CrossEntropyLoss(matched, targets).value;
  }

  // Mask-transformer class loss: unmatched proposals target void.
  if (n > 0) {
    const int void_index = static_cast<int>(n_cls);
    std::vector<int> target(n, void_index);
    for (const auto& [i, j] : pairs) target[i] = gt.segments[j].category;
    double weighted = 0.0, weight_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto row = proposals.train_logits.row(i);
      const double w = target[i] == void_index ? cfg.void_weight : 1.0;
      weighted += w * (LogSumExp(row) - row[target[i]]);
      weight_sum += w;
    }
    b.l_m2f_cls = weight_sum > 0.0 ? weighted / weight_sum : 0.0;
  }

  if (!pairs.empty()) {
    const auto pixels = SamplePixels(gt.pixels(), cfg);
    for (const auto& [i, j] : pairs) {
      const auto gt_mask = SegmentMask(gt, gt.segments[j].id);
      const auto [pred, target] =
          GatherPixels(proposals.masks.mask(i), gt_mask, pixels);
      b.l_m2f_mask += MaskBceLoss(pred, target).value;
      b.l_m2f_dice += DiceLoss(pred, target).value;
    }
    b.l_m2f_mask /= static_cast<double>(pairs.size());
    b.l_m2f_dice /= static_cast<double>(pairs.size());
  }
  b.total = CombineLoss(b, cfg);
  return out;
}

}  // namespace coatseg
