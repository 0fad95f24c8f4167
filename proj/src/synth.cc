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


#include "coatseg/synth.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "coatseg/error.h"
#include "coatseg/random.h"

namespace coatseg {
namespace {

// Independent streams so that e.g. changing the feature noise leaves the
// layout untouched.
enum Stream : std::uint64_t {
  kVocabStream = 1,
  kLayoutStream = 2,
  kFeatureStream = 3,
  kProposalStream = 4,
};

constexpr int kVocabAttempts = 100;
constexpr double kMaxPairwiseCosine = 0.9;
constexpr double kFragmentFraction = 0.4;

VocabularyEmbedding MakeVocabulary(const SceneSpec& spec) {
  const int k = spec.vocab_size;
  const int e = spec.embedding_dim;
  CounterRng rng(spec.vocab_seed.value_or(spec.seed), kVocabStream);
  const int n_seen = static_cast<int>(std::lround(spec.seen_fraction * k));
  VocabularyEmbedding v;
  for (int c = 0; c < k; ++c) {
    char name[32];
    std::snprintf(name, sizeof(name), "category_%02d", c);
    v.categories.push_back(
        {name, c < n_seen, rng.Uniform() < spec.thing_fraction});
  }
  for (int attempt = 0; attempt < kVocabAttempts; ++attempt) {
    Matrix raw(k, e);
    for (int c = 0; c < k; ++c) {
      for (int j = 0; j < e; ++j) raw(c, j) = rng.Normal();
    }
    Matrix unit;
    try {
      unit = NormalizeRows(raw);
    } catch (const Error&) {
      continue;
    }
    double worst = -1.0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        double dot = 0.0;
        for (int j = 0; j < e; ++j) dot += unit(a, j) * unit(b, j);
        worst = std::max(worst, dot);
      }
    }
    if (worst <= kMaxPairwiseCosine) {
      v.embeddings = std::move(unit);
      return v;
    }
  }
  throw Error(ErrorCode::kDegenerate,
              "could not draw " + std::to_string(k) +
                  " well-separated embeddings in dimension " +
                  std::to_string(e));
}

// Returns a per-pixel region index (-1 = void), regions 0..n-1.
std::vector<int> LayoutRegions(const SceneSpec& spec, CounterRng& rng) {
  const int h = spec.height;
  const int w = spec.width;
  const int n = spec.n_segments;
  std::vector<int> region(static_cast<std::size_t>(h) * w, -1);
  if (n == 0) return region;
  if (spec.layout == SceneLayout::kVoronoi) {
    if (static_cast<std::size_t>(n) > region.size()) {
      throw Error(ErrorCode::kPacking, std::to_string(n) +
                                           " Voronoi cells do not fit " +
                                           std::to_string(h) + "x" +
                                           std::to_string(w));
    }
    std::vector<std::pair<int, int>> seeds;
    while (static_cast<int>(seeds.size()) < n) {
      std::pair<int, int> s{rng.UniformInt(0, h - 1), rng.UniformInt(0, w - 1)};
      if (std::find(seeds.begin(), seeds.end(), s) == seeds.end()) {
        seeds.push_back(s);
      }
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int best = 0;
        long best_d = -1;
        for (int i = 0; i < n; ++i) {
          const long dr = r - seeds[i].first;
          const long dc = c - seeds[i].second;
          const long d = dr * dr + dc * dc;
          if (best_d < 0 || d < best_d) {
            best_d = d;
            best = i;
          }
        }
        region[static_cast<std::size_t>(r) * w + c] = best;
      }
    }
    return region;
  }
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const int cell_h = h / rows;
  const int cell_w = w / cols;
  if (cell_h < 2 || cell_w < 2) {
    throw Error(ErrorCode::kPacking,
                std::to_string(n) + " rectangles need a " +
                    std::to_string(rows) + "x" + std::to_string(cols) +
                    " grid of cells at least 2x2, image is " +
                    std::to_string(h) + "x" + std::to_string(w));
  }
  for (int s = 0; s < n; ++s) {
    const int cell_r = s / cols;
    const int cell_c = s % cols;
    const int min_h = static_cast<int>(std::ceil(0.6 * cell_h));
    const int min_w = static_cast<int>(std::ceil(0.6 * cell_w));
    const int rh = rng.UniformInt(min_h, cell_h);
    const int rw = rng.UniformInt(min_w, cell_w);
    const int r0 = cell_r * cell_h + rng.UniformInt(0, cell_h - rh);
    const int c0 = cell_c * cell_w + rng.UniformInt(0, cell_w - rw);
    for (int r = r0; r < r0 + rh; ++r) {
      for (int c = c0; c < c0 + rw; ++c) {
        region[static_cast<std::size_t>(r) * w + c] = s;
      }
    }
  }
  return region;
}

}  // namespace

void CheckSpec(const SceneSpec& spec) {
  if (spec.height < 1 || spec.width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "scene dimensions must be >= 1");
  }
  if (spec.n_segments < 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_segments must be >= 0");
  }
  if (spec.vocab_size < 1 || spec.embedding_dim < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "vocab_size and embedding_dim must be >= 1");
  }
  for (double f : {spec.seen_fraction, spec.thing_fraction, spec.miss_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kRange, "fractions must lie in [0, 1]");
    }
  }
  if (!(spec.feature_noise >= 0.0) || !(spec.logit_noise >= 0.0) ||
      !(spec.mask_noise >= 0.0)) {
    throw Error(ErrorCode::kRange, "noise levels must be >= 0");
  }
}

Scene GenerateScene(const SceneSpec& spec) {
  CheckSpec(spec);
  Scene scene;
  scene.vocab = MakeVocabulary(spec);
  const int k = spec.vocab_size;
  const int e = spec.embedding_dim;
  const std::size_t pixels = static_cast<std::size_t>(spec.height) * spec.width;

  CounterRng layout_rng(spec.seed, kLayoutStream);
  const std::vector<int> region = LayoutRegions(spec, layout_rng);

  // Region categories: a fresh permutation of the vocabulary per K regions.
  std::vector<int> region_category(spec.n_segments);
  std::vector<int> perm(k);
  for (int s = 0; s < spec.n_segments; ++s) {
    if (s % k == 0) {
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = k - 1; i > 0; --i) {
        std::swap(perm[i], perm[layout_rng.UniformInt(0, i)]);
      }
    }
    region_category[s] = perm[s % k];
  }

  // Segment ids; stuff regions of one category share a segment.
  PanopticMap& gt = scene.gt;
  gt = PanopticMap::AllVoid(spec.height, spec.width);
  std::vector<std::uint32_t> region_id(spec.n_segments, 0);
  std::map<int, std::uint32_t> stuff_id;
  for (int s = 0; s < spec.n_segments; ++s) {
    const int cat = region_category[s];
    const bool thing = scene.vocab.categories[cat].thing;
    if (!thing) {
      auto it = stuff_id.find(cat);
      if (it != stuff_id.end()) {
        region_id[s] = it->second;
        continue;
      }
    }
    const auto id = static_cast<std::uint32_t>(gt.segments.size() + 1);
    gt.segments.push_back({id, cat, thing});
    region_id[s] = id;
    if (!thing) stuff_id[cat] = id;
  }
  for (std::size_t p = 0; p < pixels; ++p) {
    if (region[p] >= 0) gt.segment_ids[p] = region_id[region[p]];
  }
  // Voronoi cells can be swallowed only if seeds coincide, which the layout
  // rules out; still drop any segment left without pixels.
  std::erase_if(gt.segments, [&](const Segment& seg) {
    return std::find(gt.segment_ids.begin(), gt.segment_ids.end(), seg.id) ==
           gt.segment_ids.end();
  });

  std::map<std::uint32_t, int> category_of;
  for (const Segment& seg : gt.segments) category_of[seg.id] = seg.category;

  FeatureMap& f = scene.features;
  f.height = spec.height;
  f.width = spec.width;
  f.dim = e;
  f.values.assign(pixels * e, 0.0);
  CounterRng feature_rng(spec.seed, kFeatureStream);
  for (std::size_t p = 0; p < pixels; ++p) {
    double* px = f.values.data() + p * e;
    const std::uint32_t id = gt.segment_ids[p];
    if (id != 0) {
      const auto emb = scene.vocab.embeddings.row(category_of[id]);
      std::copy(emb.begin(), emb.end(), px);
    }
    if (spec.feature_noise > 0.0) {
      for (int j = 0; j < e; ++j) px[j] += spec.feature_noise * feature_rng.Normal();
    }
  }

  const int n = static_cast<int>(gt.segments.size());
  ProposalSet& props = scene.proposals;
  props.masks = {n, spec.height, spec.width,
                 std::vector<double>(static_cast<std::size_t>(n) * pixels)};
  props.train_logits = Matrix(n, k + 1);
  CounterRng proposal_rng(spec.seed, kProposalStream);
  for (int i = 0; i < n; ++i) {
    const Segment& seg = gt.segments[i];
    const bool missed = proposal_rng.Uniform() < spec.miss_fraction;
    std::vector<std::size_t> members;
    for (std::size_t p = 0; p < pixels; ++p) {
      if (gt.segment_ids[p] == seg.id) members.push_back(p);
    }
    if (missed) {
      members.resize(static_cast<std::size_t>(
          std::floor(kFragmentFraction * static_cast<double>(members.size()))));
    }
    auto mask = props.masks.mask(i);
    std::fill(mask.begin(), mask.end(), -spec.mask_logit);
    for (std::size_t p : members) mask[p] = spec.mask_logit;
    if (spec.mask_noise > 0.0) {
      for (double& m : mask) m += spec.mask_noise * proposal_rng.Normal();
    }
    auto logits = props.train_logits.row(i);
    for (double& l : logits) {
      l = spec.logit_noise > 0.0 ? spec.logit_noise * proposal_rng.Normal() : 0.0;
    }
    logits[seg.category] += spec.category_logit;
    const bool seen = scene.vocab.categories[seg.category].seen;
    logits[k] += missed ? spec.fragment_void_logit
                        : spec.void_logit + (seen ? spec.void_bias_seen
                                                  : spec.void_bias_unseen);
  }
  return scene;
}

ProposalSet OracleMasks(const PanopticMap& gt, int num_categories,
                        double saturation) {
  ThrowIfInvalid(ValidatePanoptic(gt, num_categories), "ground truth");
  std::vector<Segment> order = gt.segments;
  std::sort(order.begin(), order.end(),
            [](const Segment& a, const Segment& b) { return a.id < b.id; });
  const int n = static_cast<int>(order.size());
  ProposalSet out;
  out.masks = {n, gt.height, gt.width,
               std::vector<double>(static_cast<std::size_t>(n) * gt.pixels())};
  out.train_logits = Matrix(n, num_categories + 1);
  for (int i = 0; i < n; ++i) {
    auto mask = out.masks.mask(i);
    for (std::size_t p = 0; p < gt.pixels(); ++p) {
      mask[p] = gt.segment_ids[p] == order[i].id ? saturation : -saturation;
    }
  }
  return out;
}

namespace {
using nlohmann::json;
}  // namespace

std::string SceneSpecToJson(const SceneSpec& s) {
  json j = {{"height", s.height},
            {"width", s.width},
            {"n_segments", s.n_segments},
            {"vocab_size", s.vocab_size},
            {"embedding_dim", s.embedding_dim},
            {"seen_fraction", s.seen_fraction},
            {"thing_fraction", s.thing_fraction},
            {"feature_noise", s.feature_noise},
            {"void_bias_seen", s.void_bias_seen},
            {"void_bias_unseen", s.void_bias_unseen},
            {"category_logit", s.category_logit},
            {"void_logit", s.void_logit},
            {"logit_noise", s.logit_noise},
            {"mask_logit", s.mask_logit},
            {"mask_noise", s.mask_noise},
            {"miss_fraction", s.miss_fraction},
            {"fragment_void_logit", s.fragment_void_logit},
            {"layout", s.layout == SceneLayout::kVoronoi ? "voronoi" : "rectangles"},
            {"seed", s.seed}};
  if (s.vocab_seed) j["vocab_seed"] = *s.vocab_seed;
  return j.dump(2) + "\n";
}

SceneSpec SceneSpecFromJson(const std::string& text) {
  SceneSpec s;
  try {
    const json j = json::parse(text);
    s.height = j.value("height", s.height);
    s.width = j.value("width", s.width);
    s.n_segments = j.value("n_segments", s.n_segments);
    s.vocab_size = j.value("vocab_size", s.vocab_size);
    s.embedding_dim = j.value("embedding_dim", s.embedding_dim);
    s.seen_fraction = j.value("seen_fraction", s.seen_fraction);
    s.thing_fraction = j.value("thing_fraction", s.thing_fraction);
    s.feature_noise = j.value("feature_noise", s.feature_noise);
    s.void_bias_seen = j.value("void_bias_seen", s.void_bias_seen);
    s.void_bias_unseen = j.value("void_bias_unseen", s.void_bias_unseen);
    s.category_logit = j.value("category_logit", s.category_logit);
    s.void_logit = j.value("void_logit", s.void_logit);
    s.logit_noise = j.value("logit_noise", s.logit_noise);
    s.mask_logit = j.value("mask_logit", s.mask_logit);
    s.mask_noise = j.value("mask_noise", s.mask_noise);
    s.miss_fraction = j.value("miss_fraction", s.miss_fraction);
    s.fragment_void_logit = j.value("fragment_void_logit", s.fragment_void_logit);
    const std::string layout = j.value("layout", std::string("rectangles"));
    if (layout == "voronoi") {
      s.layout = SceneLayout::kVoronoi;
    } else if (layout != "rectangles") {
      throw Error(ErrorCode::kParse, "unknown layout \"" + layout + "\"");
    }
    s.seed = j.value("seed", s.seed);
    if (j.contains("vocab_seed")) {
      s.vocab_seed = j.at("vocab_seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad scene spec: ") + e.what());
  }
  CheckSpec(s);
  return s;
}

}  // namespace coatseg
