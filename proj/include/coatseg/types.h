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


// Domain types shared by every stage of the engine. Types are plain values;
// invariants are checked by the Validate* functions at load and generation
// boundaries, and by each operation for the parts it depends on.
//
// Conventions:
//   * All probability math is in double precision.
//   * The void outcome is always the LAST entry of a training-logit row and
//     of a ClassDistribution.
//   * Dense tensors are row-major; a FeatureMap is (row, col, channel) and a
//     MaskLogits stack is (proposal, row, col).

#ifndef COATSEG_TYPES_H_
#define COATSEG_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace coatseg {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Dense H x W grid of E-dimensional image features.
struct FeatureMap {
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<double> values;

  std::span<const double> pixel(int r, int c) const {
    return {values.data() + (static_cast<std::size_t>(r) * width + c) * dim,
            static_cast<std::size_t>(dim)};
  }
};

struct Category {
  std::string name;
  bool seen = true;
  bool thing = true;

  friend bool operator==(const Category&, const Category&) = default;
};

// N_cls unit-norm text embeddings plus per-category metadata.
struct VocabularyEmbedding {
  std::vector<Category> categories;
  Matrix embeddings;

  std::size_t size() const { return categories.size(); }
  std::size_t dim() const { return embeddings.cols(); }
};

// N x H x W stack of per-pixel mask logits.
struct MaskLogits {
  int count = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;

  std::size_t pixels() const {
    return static_cast<std::size_t>(height) * width;
  }
  std::span<const double> mask(int i) const {
    return {values.data() + i * pixels(), pixels()};
  }
  std::span<double> mask(int i) {
    return {values.data() + i * pixels(), pixels()};
  }
};

// Candidate masks plus their training-vocabulary logits. Each logit row has
// N_train + 1 entries; the last one is the void logit.
struct ProposalSet {
  MaskLogits masks;
  Matrix train_logits;

  int count() const { return masks.count; }
};

// Probability simplex over N_cls categories followed by the void entry.
struct ClassDistribution {
  std::vector<double> probs;

  std::size_t num_categories() const {
    return probs.empty() ? 0 : probs.size() - 1;
  }
  double void_prob() const { return probs.back(); }
};

struct Segment {
  std::uint32_t id = 0;
  int category = 0;
  bool thing = false;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Per-pixel segment ids (0 = void) plus one record per nonzero id.
struct PanopticMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> segment_ids;
  std::vector<Segment> segments;

  static PanopticMap AllVoid(int height, int width);
  std::size_t pixels() const {
    return static_cast<std::size_t>(height) * width;
  }
  const Segment* find(std::uint32_t id) const;

  friend bool operator==(const PanopticMap&, const PanopticMap&) = default;
};

struct CoatConfig {
  double gamma = 0.5;  // CLIP trust factor
  bool enabled = true;
};

struct EnsembleConfig {
  double alpha_seen = 0.4;
  double beta_unseen = 0.8;
  double logit_scale = 100.0;
};

void CheckConfig(const CoatConfig& cfg);
void CheckConfig(const EnsembleConfig& cfg);

struct Violation {
  std::vector<std::size_t> indices;
  std::string reason;

  friend bool operator==(const Violation&, const Violation&) = default;
};
using ValidationReport = std::vector<Violation>;

ValidationReport ValidateFeatureMap(const FeatureMap& f);
ValidationReport ValidateVocabulary(const VocabularyEmbedding& v);
ValidationReport ValidateProposals(const ProposalSet& p);
ValidationReport ValidateDistribution(const ClassDistribution& d);
// `num_categories` < 0 skips the category range check.
ValidationReport ValidatePanoptic(const PanopticMap& m, int num_categories = -1);

// Throws kInvalidArgument with the joined report when it is not empty.
void ThrowIfInvalid(const ValidationReport& report, const std::string& what);

// Returns a copy with every row scaled to unit Euclidean norm. Throws
// kZeroNorm naming the first zero-norm row.
Matrix NormalizeRows(const Matrix& m);

std::vector<double> Softmax(std::span<const double> logits);
double LogSumExp(std::span<const double> logits);
double Sigmoid(double x);

}  // namespace coatseg

#endif  // COATSEG_TYPES_H_
