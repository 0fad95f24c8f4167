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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "coatseg/classify.h"
#include "coatseg/error.h"
#include "coatseg/types.h"
#include "test_util.h"

namespace coatseg {
namespace {

VocabularyEmbedding Vocab(const Matrix& rows, std::vector<bool> seen = {}) {
  VocabularyEmbedding v;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    v.categories.push_back({"c" + std::to_string(i),
                            seen.empty() ? true : static_cast<bool>(seen[i]),
                            true});
  }
  v.embeddings = rows;
  return v;
}

TEST(MaskPoolTest, ConstantMapPoolsToConstant) {
  FeatureMap f{3, 4, 2, {}};
  for (int i = 0; i < 12; ++i) {
    f.values.push_back(0.5);
    f.values.push_back(-2.0);
  }
  std::vector<std::uint8_t> mask(12, 0);
  mask[1] = mask[5] = mask[11] = 1;
  const PooledFeature p = MaskPool(f, mask);
  EXPECT_EQ(p.values, (std::vector<double>{0.5, -2.0}));
  EXPECT_EQ(p.source_mask_area, 3u);
}

TEST(MaskPoolTest, SinglePixelReturnsThatPixel) {
  std::mt19937_64 rng(1);
  FeatureMap f{4, 5, 3, testing::RandomVector(rng, 60)};
  std::vector<std::uint8_t> mask(20, 0);
  mask[2 * 5 + 3] = 1;
  const PooledFeature p = MaskPool(f, mask);
  const auto px = f.pixel(2, 3);
  EXPECT_EQ(p.values, std::vector<double>(px.begin(), px.end()));
}

TEST(MaskPoolTest, EmptyMaskIsAnError) {
  FeatureMap f{2, 2, 1, {1, 2, 3, 4}};
  try {
    MaskPool(f, std::vector<std::uint8_t>(4, 0));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMask);
  }
  EXPECT_THROW(MaskPool(f, std::vector<std::uint8_t>(3, 1)), Error);
}

// Accumulates channel by channel with an explicit row/column loop.
std::vector<double> DoubleLoopMean(const FeatureMap& f,
                                   const std::vector<std::uint8_t>& mask) {
  std::vector<double> out(f.dim, 0.0);
  for (int e = 0; e < f.dim; ++e) {
    double sum = 0.0;
    int count = 0;
    for (int r = 0; r < f.height; ++r) {
      for (int c = 0; c < f.width; ++c) {
        if (!mask[r * f.width + c]) continue;
        sum += f.values[(static_cast<std::size_t>(r) * f.width + c) * f.dim + e];
        ++count;
      }
    }
    out[e] = sum / count;
  }
  return out;
}

TEST(MaskPoolTest, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> side(1, 32), dim(1, 16);
  for (int trial = 0; trial < 200; ++trial) {
    FeatureMap f{side(rng), side(rng), dim(rng), {}};
    f.values = testing::RandomVector(
        rng, static_cast<std::size_t>(f.height) * f.width * f.dim);
    auto mask = testing::RandomBinary(rng, static_cast<std::size_t>(f.height) * f.width, 0.3);
    mask[rng() % mask.size()] = 1;
    const auto expected = DoubleLoopMean(f, mask);
    const auto got = MaskPool(f, mask).values;
    for (int e = 0; e < f.dim; ++e) ASSERT_NEAR(got[e], expected[e], 1e-12);
  }
}

TEST(MaskPoolTest, RandomSevenPixelMask) {
  std::mt19937_64 rng(8);
  FeatureMap f{4, 4, 3, testing::RandomVector(rng, 48)};
  std::vector<std::uint8_t> mask(16, 0);
  for (int i : {0, 2, 5, 7, 9, 12, 15}) mask[i] = 1;
  const auto expected = DoubleLoopMean(f, mask);
  const auto got = MaskPool(f, mask);
  EXPECT_EQ(got.source_mask_area, 7u);
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(got.values[e], expected[e], 1e-12);
}

TEST(ClipClassProbsTest, IdenticalRowsGiveUniform) {
  const auto v = Vocab(Matrix(2, 2, {0.6, 0.8, 0.6, 0.8}));
  const auto p = ClipClassProbs({{0.3, -1.0}, 1}, v, 100.0);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(ClipClassProbsTest, UnitScaleDirectEvaluation) {
  const auto v = Vocab(Matrix(2, 2, {1, 0, 0, 1}));
  const auto p = ClipClassProbs({{1.0, 0.0}, 1}, v, 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(p[0], e / (e + 1.0), 1e-15);
  EXPECT_NEAR(p[1], 1.0 / (e + 1.0), 1e-15);
  EXPECT_NEAR(p[0], 0.7311, 1e-4);
}

TEST(ClipClassProbsTest, LargeScaleSaturates) {
  const auto v = Vocab(Matrix(2, 2, {1, 0, 0, 1}));
  const auto p = ClipClassProbs({{1.0, 0.0}, 1}, v, 100.0);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_LT(p[1], 1e-40);
  EXPECT_GT(p[1], 0.0);
}

TEST(ClipClassProbsTest, PooledFeatureIsNormalized) {
  const auto v = Vocab(Matrix(2, 2, {1, 0, 0, 1}));
  const auto a = ClipClassProbs({{5.0, 0.0}, 1}, v, 1.0);
  const auto b = ClipClassProbs({{1.0, 0.0}, 1}, v, 1.0);
  EXPECT_NEAR(a[0], b[0], 1e-15);
}

TEST(ClipClassProbsTest, ZeroFeatureIsDegenerate) {
  const auto v = Vocab(Matrix(2, 2, {1, 0, 0, 1}));
  try {
    ClipClassProbs({{0.0, 0.0}, 1}, v, 100.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

TEST(ClipClassProbsTest, PermutationEquivariant) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7, d = 3 + trial % 5;
    const Matrix rows = NormalizeRows(Matrix(n, d, testing::RandomVector(rng, n * d)));
    const PooledFeature pooled{testing::RandomVector(rng, d), 4};
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix permuted(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) permuted(i, j) = rows(perm[i], j);
    }
    const auto p = ClipClassProbs(pooled, Vocab(rows), 10.0);
    const auto q = ClipClassProbs(pooled, Vocab(permuted), 10.0);
    for (int i = 0; i < n; ++i) ASSERT_NEAR(q[i], p[perm[i]], 1e-15);
  }
}

TEST(EnsembleProbsTest, ExponentIdentities) {
  const auto v = Vocab(Matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
  const std::vector<double> p_in = {0.5, 0.3, 0.2}, p_clip = {0.1, 0.1, 0.8};
  const auto in_only = EnsembleProbs(p_in, p_clip, v, {0.0, 0.8, 100.0});
  const auto clip_only = EnsembleProbs(p_in, p_clip, v, {1.0, 0.8, 100.0});
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(in_only[i], p_in[i], 1e-15);
    EXPECT_NEAR(clip_only[i], p_clip[i], 1e-15);
  }
}

TEST(EnsembleProbsTest, SeenAndUnseenExponentsDirectEvaluation) {
  const auto v = Vocab(Matrix(2, 2, {1, 0, 0, 1}), {true, false});
  const std::vector<double> p_in = {0.7, 0.3}, p_clip = {0.2, 0.8};
  const EnsembleConfig cfg{0.4, 0.8, 100.0};
  const auto p = EnsembleProbs(p_in, p_clip, v, cfg);
  const double a = std::pow(0.7, 0.6) * std::pow(0.2, 0.4);
  const double b = std::pow(0.3, 0.2) * std::pow(0.8, 0.8);
  EXPECT_NEAR(p[0], a / (a + b), 1e-14);
  EXPECT_NEAR(p[1], b / (a + b), 1e-14);
}

TEST(EnsembleProbsTest, FixedPointAndArgmax) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 9;
    const auto p = Softmax(testing::RandomVector(rng, n));
    std::vector<bool> seen(n);
    for (int i = 0; i < n; ++i) seen[i] = (rng() & 1) != 0;
    const EnsembleConfig cfg{std::uniform_real_distribution<double>(0, 1)(rng),
                             std::uniform_real_distribution<double>(0, 1)(rng),
                             100.0};
    const Matrix rows(n, 1, std::vector<double>(n, 1.0));
    const auto out = EnsembleProbs(p, p, Vocab(rows, seen), cfg);
    for (int i = 0; i < n; ++i) ASSERT_NEAR(out[i], p[i], 1e-12);
    ASSERT_EQ(std::max_element(out.begin(), out.end()) - out.begin(),
              std::max_element(p.begin(), p.end()) - p.begin());
  }
}

TEST(EnsembleProbsTest, DisjointSupportIsDegenerate) {
  const auto v = Vocab(Matrix(2, 2, {1, 0, 0, 1}));
  try {
    EnsembleProbs(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0},
                  v, {});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

TEST(ComposeTest, GateExtremesAndDirectEvaluation) {
  const std::vector<double> p_ens = {0.6, 0.4};
  EXPECT_EQ(ComposeClassDistribution(p_ens, 1.0).probs,
            (std::vector<double>{0.6, 0.4, 0.0}));
  EXPECT_EQ(ComposeClassDistribution(p_ens, 0.0).probs,
            (std::vector<double>{0.0, 0.0, 1.0}));
  const auto half = ComposeClassDistribution(p_ens, 0.5).probs;
  EXPECT_NEAR(half[0], 0.3, 1e-15);
  EXPECT_NEAR(half[1], 0.2, 1e-15);
  EXPECT_NEAR(half[2], 0.5, 1e-15);
}

TEST(ComposeTest, OutOfRangeObjectness) {
  const std::vector<double> p_ens = {1.0};
  try {
    ComposeClassDistribution(p_ens, 1.01);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRange);
  }
  EXPECT_THROW(ComposeClassDistribution(p_ens, -0.01), Error);
}

TEST(ComposeTest, SumsToOne) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p_ens = Softmax(testing::RandomVector(rng, 1 + trial % 12, -20, 20));
    const auto d = ComposeClassDistribution(p_ens, u(rng));
    ASSERT_NEAR(std::accumulate(d.probs.begin(), d.probs.end(), 0.0), 1.0, 1e-12);
    ASSERT_TRUE(ValidateDistribution(d).empty());
  }
}

TEST(ObjectnessTest, KnownValues) {
  EXPECT_NEAR(ObjectnessFromLogits(std::vector<double>(5, 2.5)), 4.0 / 5.0, 1e-15);
  EXPECT_LT(ObjectnessFromLogits(std::vector<double>{0, 0, 0, 50}), 1e-20);
  EXPECT_NEAR(ObjectnessFromLogits(std::vector<double>{0, 0}), 0.5, 1e-15);
}

TEST(ObjectnessTest, AlwaysInUnitInterval) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto logits = testing::RandomVector(rng, 2 + trial % 10, -800, 800);
    const double p = ObjectnessFromLogits(logits);
    ASSERT_TRUE(p >= 0.0 && p <= 1.0) << p;
  }
}

TEST(InVocabularyProbsTest, DropsVoidAndRenormalizes) {
  const auto p = InVocabularyProbs(std::vector<double>{std::log(3.0), 0.0, 9.0});
  EXPECT_NEAR(p[0], 0.75, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
}

TEST(BinarizeMaskTest, ThresholdOnSigmoid) {
  const std::vector<double> logits = {-3.0, -0.1, 0.1, 3.0};
  EXPECT_EQ(BinarizeMask(logits, 0.5), (std::vector<std::uint8_t>{0, 0, 1, 1}));
  EXPECT_EQ(BinarizeMask(logits, 0.9), (std::vector<std::uint8_t>{0, 0, 0, 1}));
}

}  // namespace
}  // namespace coatseg
