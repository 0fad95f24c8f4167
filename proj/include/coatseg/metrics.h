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


// Panoptic quality (PQ = SQ * RQ) with seen/unseen stratification, and mean
// intersection-over-union for semantic maps.
//
// Matching follows the standard panoptic definition: a predicted and a
// ground-truth segment match iff they share a category and IoU > 0.5, with
// ground-truth void pixels removed from the union. Unmatched predictions
// lying more than half on ground-truth void are not false positives.

#ifndef COATSEG_METRICS_H_
#define COATSEG_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "coatseg/types.h"

namespace coatseg {

struct CategoryPqStats {
  double iou_sum = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t gt_segments = 0;
};

// Sufficient statistics; accumulate across images, then summarize.
struct PqStats {
  std::vector<CategoryPqStats> per_category;

  explicit PqStats(std::size_t num_categories = 0)
      : per_category(num_categories) {}
  PqStats& operator+=(const PqStats& other);
};

struct CategoryPq {
  int category = 0;
  CategoryPqStats stats;
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
  bool populated = false;  // tp + fp + fn > 0
};

struct PqAggregate {
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
  int n = 0;  // categories averaged
};

struct PqReport {
  std::vector<CategoryPq> per_category;
  PqAggregate all;
  PqAggregate things;
  PqAggregate stuff;
  PqAggregate seen;
  PqAggregate unseen;
  // Mean weighted by each category's ground-truth segment count.
  PqAggregate gt_weighted;
};

struct PqOptions {
  // Average over every vocabulary category instead of populated ones only.
  bool average_over_full_vocabulary = false;
};

PqStats AccumulatePq(const PanopticMap& pred, const PanopticMap& gt,
                     std::size_t num_categories);
PqReport SummarizePq(const PqStats& stats, std::span<const Category> categories,
                     const PqOptions& options = {});
PqReport PanopticQuality(const PanopticMap& pred, const PanopticMap& gt,
                         std::span<const Category> categories,
                         const PqOptions& options = {});

// Category-count-weighted combination of disjoint aggregates.
PqAggregate CombineAggregates(std::span<const PqAggregate> parts);

struct SemanticLabels {
  std::vector<int> category;          // H * W
  std::vector<std::uint8_t> is_void;  // H * W
};

SemanticLabels SemanticFromPanoptic(const PanopticMap& map);

struct MiouResult {
  std::vector<double> iou;       // per category, NaN when undefined
  std::vector<bool> in_gt;       // category occurs in ground truth
  double mean = 0.0;             // over categories present in ground truth
};

MiouResult Miou(std::span<const int> pred, std::span<const int> gt,
                std::span<const std::uint8_t> gt_void, int num_categories);

}  // namespace coatseg

#endif  // COATSEG_METRICS_H_
