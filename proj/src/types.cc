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


#include "coatseg/types.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "coatseg/error.h"

namespace coatseg {
namespace {

constexpr double kUnitNormTolerance = 1e-6;
constexpr double kSimplexTolerance = 1e-6;

bool AllFinite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(),
                     [](double x) { return std::isfinite(x); });
}

std::optional<std::size_t> FirstNonFinite(std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) return i;
  }
  return std::nullopt;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::kShape,
                "matrix data has " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
}

PanopticMap PanopticMap::AllVoid(int height, int width) {
  PanopticMap m;
  m.height = height;
  m.width = width;
  m.segment_ids.assign(static_cast<std::size_t>(height) * width, 0);
  return m;
}

const Segment* PanopticMap::find(std::uint32_t id) const {
  for (const Segment& s : segments) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

void CheckConfig(const CoatConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) {
    throw Error(ErrorCode::kRange,
                "gamma must lie in [0, 1], got " + std::to_string(cfg.gamma));
  }
}

void CheckConfig(const EnsembleConfig& cfg) {
  if (!(cfg.alpha_seen >= 0.0 && cfg.alpha_seen <= 1.0)) {
    throw Error(ErrorCode::kRange, "alpha_seen must lie in [0, 1]");
  }
  if (!(cfg.beta_unseen >= 0.0 && cfg.beta_unseen <= 1.0)) {
    throw Error(ErrorCode::kRange, "beta_unseen must lie in [0, 1]");
  }
  if (!(cfg.logit_scale > 0.0) || !std::isfinite(cfg.logit_scale)) {
    throw Error(ErrorCode::kRange, "logit_scale must be positive and finite");
  }
}

ValidationReport ValidateFeatureMap(const FeatureMap& f) {
  ValidationReport report;
  if (f.height < 1 || f.width < 1 || f.dim < 1) {
    report.push_back({{}, "feature map dimensions must all be >= 1"});
    return report;
  }
  const std::size_t expected =
      static_cast<std::size_t>(f.height) * f.width * f.dim;
  if (f.values.size() != expected) {
    report.push_back({{}, "feature map holds " +
                              std::to_string(f.values.size()) +
                              " values, expected " + std::to_string(expected)});
    return report;
  }
  if (auto bad = FirstNonFinite(f.values)) {
    report.push_back({{*bad}, "non-finite feature value"});
  }
  return report;
}

ValidationReport ValidateVocabulary(const VocabularyEmbedding& v) {
  ValidationReport report;
  const auto& emb = v.embeddings;
  if (v.categories.empty()) {
    report.push_back({{}, "vocabulary is empty"});
  }
  if (emb.rows() != v.categories.size()) {
    report.push_back({{}, "vocabulary lists " +
                              std::to_string(v.categories.size()) +
                              " categories but " + std::to_string(emb.rows()) +
                              " embedding rows"});
  }
  if (emb.rows() > 0 && emb.cols() == 0) {
    report.push_back({{}, "embedding dimension is zero"});
  }
  for (std::size_t r = 0; r < emb.rows(); ++r) {
    auto row = emb.row(r);
    if (!AllFinite(row)) {
      report.push_back({{r}, "embedding row has non-finite values"});
      continue;
    }
    double sq = 0.0;
    for (double x : row) sq += x * x;
    const double norm = std::sqrt(sq);
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      std::ostringstream os;
      os << "embedding row " << r << " has norm " << norm
         << ", expected unit norm";
      report.push_back({{r}, os.str()});
    }
  }
  std::map<std::string, std::vector<std::size_t>> by_name;
  for (std::size_t i = 0; i < v.categories.size(); ++i) {
    by_name[v.categories[i].name].push_back(i);
  }
  // Report duplicates in order of first occurrence.
  std::vector<std::vector<std::size_t>> dups;
  for (auto& [name, idx] : by_name) {
    if (idx.size() > 1) dups.push_back(idx);
  }
  std::sort(dups.begin(), dups.end());
  for (auto& idx : dups) {
    report.push_back(
        {idx, "duplicate category name \"" + v.categories[idx[0]].name + "\""});
  }
  return report;
}

ValidationReport ValidateProposals(const ProposalSet& p) {
  ValidationReport report;
  const MaskLogits& m = p.masks;
  if (m.count < 0 || m.height < 1 || m.width < 1) {
    report.push_back({{}, "mask stack dimensions are invalid"});
    return report;
  }
  if (m.values.size() != static_cast<std::size_t>(m.count) * m.pixels()) {
    report.push_back({{}, "mask stack value count does not match N x H x W"});
    return report;
  }
  if (p.train_logits.rows() != static_cast<std::size_t>(m.count)) {
    report.push_back({{}, "train_logits has " +
                              std::to_string(p.train_logits.rows()) +
                              " rows for " + std::to_string(m.count) +
                              " proposals"});
  }
  if (m.count > 0 && p.train_logits.cols() < 2) {
    report.push_back(
        {{}, "train_logits needs at least one category plus the void entry"});
  }
  for (int i = 0; i < m.count; ++i) {
    if (!AllFinite(m.mask(i))) {
      report.push_back({{static_cast<std::size_t>(i)}, "non-finite mask logit"});
    }
  }
  for (std::size_t r = 0; r < p.train_logits.rows(); ++r) {
    if (!AllFinite(p.train_logits.row(r))) {
      report.push_back({{r}, "non-finite training logit"});
    }
  }
  return report;
}

ValidationReport ValidateDistribution(const ClassDistribution& d) {
  ValidationReport report;
  if (d.probs.size() < 2) {
    report.push_back({{}, "distribution needs at least one category and void"});
    return report;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    const double p = d.probs[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      report.push_back({{i}, "probability outside [0, 1]"});
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    report.push_back({{}, "probabilities sum to " + std::to_string(sum)});
  }
  return report;
}

ValidationReport ValidatePanoptic(const PanopticMap& m, int num_categories) {
  ValidationReport report;
  if (m.height < 1 || m.width < 1) {
    report.push_back({{}, "panoptic map dimensions must be >= 1"});
    return report;
  }
  if (m.segment_ids.size() != m.pixels()) {
    report.push_back({{}, "segment id raster has wrong size"});
    return report;
  }
  std::map<std::uint32_t, std::size_t> index_of;
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    const Segment& s = m.segments[i];
    if (s.id == 0) {
      report.push_back({{i}, "segment id 0 is reserved for void"});
      continue;
    }
    auto [it, inserted] = index_of.emplace(s.id, i);
    if (!inserted) {
      report.push_back({{it->second, i},
                        "duplicate segment id " + std::to_string(s.id)});
    }
    if (num_categories >= 0 &&
        (s.category < 0 || s.category >= num_categories)) {
      report.push_back({{i}, "segment " + std::to_string(s.id) +
                                 " has category " +
                                 std::to_string(s.category) +
                                 " outside the vocabulary"});
    }
  }
  std::map<std::uint32_t, std::size_t> area;
  for (std::uint32_t id : m.segment_ids) {
    if (id != 0) ++area[id];
  }
  std::vector<std::size_t> orphans;
  for (const auto& [id, count] : area) {
    if (!index_of.count(id)) orphans.push_back(id);
  }
  if (!orphans.empty()) {
    std::string ids;
    for (std::size_t id : orphans) {
      ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    }
    report.push_back({orphans, "raster ids missing from segments: " + ids});
  }
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    const Segment& s = m.segments[i];
    if (s.id != 0 && !area.count(s.id)) {
      report.push_back(
          {{i}, "segment " + std::to_string(s.id) + " covers no pixels"});
    }
  }
  return report;
}

void ThrowIfInvalid(const ValidationReport& report, const std::string& what) {
  if (report.empty()) return;
  std::string message = what + " is invalid:";
  for (const Violation& v : report) message += " " + v.reason + ";";
  throw Error(ErrorCode::kInvalidArgument, message);
}

Matrix NormalizeRows(const Matrix& m) {
  Matrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = out.row(r);
    double sq = 0.0;
    for (double x : row) sq += x * x;
    if (!(sq > 0.0)) {
      throw Error(ErrorCode::kZeroNorm,
                  "row " + std::to_string(r) + " has zero norm",
                  std::vector<std::uint64_t>{r});
    }
    const double norm = std::sqrt(sq);
    for (double& x : row) x /= norm;
  }
  return out;
}

double LogSumExp(std::span<const double> logits) {
  if (logits.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double x : logits) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (double& x : out) x /= s;
  return out;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace coatseg
