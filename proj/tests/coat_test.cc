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


#include <array>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "coatseg/classify.h"
#include "coatseg/coat.h"
#include "coatseg/error.h"
#include "coatseg/synth.h"
#include "coatseg/types.h"

namespace coatseg {
namespace {

double GridValue(int i, int steps) { return static_cast<double>(i) / steps; }

TEST(CertaintyTest, KnownValues) {
  EXPECT_DOUBLE_EQ(Certainty(std::vector<double>(4, 0.25)), 0.25);
  EXPECT_DOUBLE_EQ(Certainty(std::vector<double>{0.0, 1.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(Certainty(std::vector<double>{0.7, 0.2, 0.1}), 0.7);
}

TEST(CertaintyTest, EmptyVocabularyIsAnError) {
  EXPECT_THROW(Certainty(std::vector<double>{}), Error);
}

TEST(AdjustObjectnessTest, KnownValues) {
  EXPECT_NEAR(AdjustObjectness(0.2, 0.8, 0.5).p_obj_after, 0.52, 1e-15);
  EXPECT_DOUBLE_EQ(AdjustObjectness(0.0, 1.0, 1.0).p_obj_after, 1.0);
  const CoatDecision d = AdjustObjectness(0.3, 0.6, 0.25);
  EXPECT_EQ(d.p_obj_before, 0.3);
  EXPECT_EQ(d.p_cer, 0.6);
  EXPECT_EQ(d.gamma, 0.25);
}

TEST(AdjustObjectnessTest, OutOfRangeArguments) {
  for (const auto& [p, c, g] : std::vector<std::array<double, 3>>{
           {-0.1, 0.5, 0.5}, {1.1, 0.5, 0.5}, {0.5, -0.1, 0.5},
           {0.5, 1.1, 0.5}, {0.5, 0.5, -0.1}, {0.5, 0.5, 1.1},
           {NAN, 0.5, 0.5}}) {
    try {
      AdjustObjectness(p, c, g);
      FAIL() << "expected an error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kRange);
    }
  }
}

TEST(AdjustObjectnessTest, GridAlgebra) {
  constexpr int kSteps = 100, kGammaSteps = 10;
  for (int k = 0; k <= kGammaSteps; ++k) {
    const double gamma = GridValue(k, kGammaSteps);
    for (int i = 0; i <= kSteps; ++i) {
      const double p_obj = GridValue(i, kSteps);
      for (int j = 0; j <= kSteps; ++j) {
        const double p_cer = GridValue(j, kSteps);
        const double after = AdjustObjectness(p_obj, p_cer, gamma).p_obj_after;
        ASSERT_NEAR(after, 1.0 - (1.0 - gamma * p_cer) * (1.0 - p_obj), 1e-12);
        ASSERT_NEAR(after - p_obj, gamma * p_cer * (1.0 - p_obj), 1e-12);
        ASSERT_LE(after - p_obj, gamma * p_cer + 1e-12);
        ASSERT_GE(after, p_obj);
        ASSERT_GE(after, 0.0);
        ASSERT_LE(after, 1.0);
        if (k == 0) {
          ASSERT_EQ(after, p_obj);
        }
        if (i > 0) {
          ASSERT_GE(after, AdjustObjectness(GridValue(i - 1, kSteps), p_cer, gamma)
                               .p_obj_after);
        }
        if (j > 0) {
          ASSERT_GE(after, AdjustObjectness(p_obj, GridValue(j - 1, kSteps), gamma)
                               .p_obj_after);
        }
        if (k > 0) {
          ASSERT_GE(after,
                    AdjustObjectness(p_obj, p_cer, GridValue(k - 1, kGammaSteps))
                        .p_obj_after);
        }
      }
    }
  }
}

// Two proposals over a 2x2 image; proposal 1's mask is empty after
// binarization.
struct SmallCase {
  ProposalSet proposals;
  FeatureMap features;
  VocabularyEmbedding vocab;
};

SmallCase MakeSmallCase() {
  SmallCase s;
  s.vocab.categories = {{"a", true, true}, {"b", false, true}};
  s.vocab.embeddings = Matrix(2, 2, {1, 0, 0, 1});
  s.features = {2, 2, 2, {1, 0, 1, 0, 0, 1, 0, 1}};
  s.proposals.masks = {2, 2, 2, {5, 5, -5, -5, -5, -5, -5, -5}};
  s.proposals.train_logits = Matrix(2, 3, {0.0, 0.0, 2.0, 1.0, 0.0, 3.0});
  return s;
}

TEST(ApplyCoatTest, DisabledIsPassthrough) {
  const SmallCase s = MakeSmallCase();
  const auto scores = ApplyCoat(s.proposals, s.features, s.vocab,
                                {0.5, false}, {});
  ASSERT_EQ(scores.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(scores[i].p_obj_after, scores[i].p_obj_before);
    EXPECT_EQ(scores[i].p_obj_before,
              ObjectnessFromLogits(s.proposals.train_logits.row(i)));
  }
}

TEST(ApplyCoatTest, EmptyMaskKeepsObjectnessAndGetsUniformClip) {
  const SmallCase s = MakeSmallCase();
  const auto scores = ApplyCoat(s.proposals, s.features, s.vocab, {1.0, true}, {});
  EXPECT_FALSE(scores[1].pooled);
  EXPECT_EQ(scores[1].p_obj_after, scores[1].p_obj_before);
  EXPECT_EQ(scores[1].p_clip, (std::vector<double>{0.5, 0.5}));
  EXPECT_TRUE(scores[0].pooled);
  EXPECT_GT(scores[0].p_obj_after, scores[0].p_obj_before);
  EXPECT_NEAR(scores[0].p_cer, 1.0, 1e-12);
}

TEST(ApplyCoatTest, DecisionMatchesFormula) {
  const SmallCase s = MakeSmallCase();
  const auto scores = ApplyCoat(s.proposals, s.features, s.vocab, {0.3, true}, {});
  const double p = scores[0].p_obj_before;
  EXPECT_NEAR(scores[0].p_obj_after,
              1.0 - (1.0 - 0.3 * scores[0].p_cer) * (1.0 - p), 1e-12);
}

TEST(ApplyCoatTest, ShapeMismatchIsAnError) {
  SmallCase s = MakeSmallCase();
  s.features = {3, 2, 2, std::vector<double>(12, 1.0)};
  try {
    ApplyCoat(s.proposals, s.features, s.vocab, {}, {});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
  s = MakeSmallCase();
  s.vocab.embeddings = Matrix(2, 3, {1, 0, 0, 0, 1, 0});
  EXPECT_THROW(ApplyCoat(s.proposals, s.features, s.vocab, {}, {}), Error);
}

TEST(ApplyCoatTest, ExactEmbeddingFeaturesGiveBoundedBoost) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.void_bias_unseen = 4.0;
    const Scene scene = GenerateScene(spec);
    for (double gamma : {0.0, 0.25, 0.5, 1.0}) {
      const auto scores = ApplyCoat(scene.proposals, scene.features,
                                    scene.vocab, {gamma, true}, {});
      for (const ProposalScores& s : scores) {
        ASSERT_TRUE(s.pooled);
        ASSERT_GT(s.p_cer, 0.99);
        ASSERT_GE(s.p_obj_after,
                  1.0 - (1.0 - 0.99 * gamma) * (1.0 - s.p_obj_before) - 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace coatseg
