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


#include "coatseg/metrics.h"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "coatseg/error.h"

namespace coatseg {
namespace {

struct SegmentInfo {
  int category = 0;
  std::int64_t area = 0;
};

std::map<std::uint32_t, SegmentInfo> CollectSegments(const PanopticMap& m,
                                                     std::size_t n_cls,
                                                     const char* which) {
  const auto report = ValidatePanoptic(m, static_cast<int>(n_cls));
  if (!report.empty()) {
    throw Error(ErrorCode::kInvalidPanoptic,
                std::string(which) + " map: " + report.front().reason);
  }
  std::map<std::uint32_t, SegmentInfo> out;
  for (const Segment& s : m.segments) out[s.id].category = s.category;
  for (std::uint32_t id : m.segment_ids) {
    if (id != 0) ++out[id].area;
  }
  return out;
}

struct Accumulator {
  double pq = 0.0, sq = 0.0, rq = 0.0, weight = 0.0;
  int n = 0;
  void Add(const CategoryPq& c, double w) {
    pq += w * c.pq;
    sq += w * c.sq;
    rq += w * c.rq;
    weight += w;
    ++n;
  }
  PqAggregate Finish() const {
    if (weight <= 0.0) return {0.0, 0.0, 0.0, n};
    return {pq / weight, sq / weight, rq / weight, n};
  }
};

}  // namespace

PqStats& PqStats::operator+=(const PqStats& other) {
  if (per_category.size() < other.per_category.size()) {
    per_category.resize(other.per_category.size());
  }
  for (std::size_t c = 0; c < other.per_category.size(); ++c) {
    auto& a = per_category[c];
    const auto& b = other.per_category[c];
    a.iou_sum += b.iou_sum;
    a.tp += b.tp;
    a.fp += b.fp;
    a.fn += b.fn;
    a.gt_segments += b.gt_segments;
  }
  return *this;
}

PqStats AccumulatePq(const PanopticMap& pred, const PanopticMap& gt,
                     std::size_t num_categories) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw Error(ErrorCode::kShape,
                "prediction is " + std::to_string(pred.height) + "x" +
                    std::to_string(pred.width) + ", ground truth is " +
                    std::to_string(gt.height) + "x" +
                    std::to_string(gt.width));
  }
  const auto gt_segs = CollectSegments(gt, num_categories, "ground-truth");
  const auto pred_segs = CollectSegments(pred, num_categories, "prediction");

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t> inter;
  for (std::size_t p = 0; p < gt.segment_ids.size(); ++p) {
    ++inter[{gt.segment_ids[p], pred.segment_ids[p]}];
  }
  auto void_overlap = [&](std::uint32_t pred_id) -> std::int64_t {
    auto it = inter.find({0u, pred_id});
    return it == inter.end() ? 0 : it->second;
  };

  PqStats stats(num_categories);
  std::set<std::uint32_t> gt_matched, pred_matched;
  for (const auto& [key, count] : inter) {
    const auto [gt_id, pred_id] = key;
    if (gt_id == 0 || pred_id == 0) continue;
    const SegmentInfo& g = gt_segs.at(gt_id);
    const SegmentInfo& q = pred_segs.at(pred_id);
    if (g.category != q.category) continue;
    const std::int64_t uni = q.area + g.area - count - void_overlap(pred_id);
    const double iou = static_cast<double>(count) / static_cast<double>(uni);
    if (iou > 0.5) {
      auto& s = stats.per_category[g.category];
      ++s.tp;
      s.iou_sum += iou;
      gt_matched.insert(gt_id);
      pred_matched.insert(pred_id);
    }
  }
  for (const auto& [id, g] : gt_segs) {
    ++stats.per_category[g.category].gt_segments;
    if (!gt_matched.count(id)) ++stats.per_category[g.category].fn;
  }
  for (const auto& [id, q] : pred_segs) {
    if (pred_matched.count(id)) continue;
    if (static_cast<double>(void_overlap(id)) / static_cast<double>(q.area) >
        0.5) {
      continue;
    }
    ++stats.per_category[q.category].fp;
  }
  return stats;
}

PqReport SummarizePq(const PqStats& stats, std::span<const Category> categories,
                     const PqOptions& options) {
  if (stats.per_category.size() != categories.size()) {
    throw Error(ErrorCode::kVocabularyMismatch,
                "statistics cover " + std::to_string(stats.per_category.size()) +
                    " categories, vocabulary has " +
                    std::to_string(categories.size()));
  }
  PqReport report;
  Accumulator all, things, stuff, seen, unseen, weighted;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    CategoryPq r;
    r.category = static_cast<int>(c);
    r.stats = stats.per_category[c];
    const auto& s = r.stats;
    r.populated = s.tp + s.fp + s.fn > 0;
    if (r.populated) {
      const double denom = static_cast<double>(s.tp) + 0.5 * s.fp + 0.5 * s.fn;
      r.pq = s.iou_sum / denom;
      r.sq = s.tp > 0 ? s.iou_sum / static_cast<double>(s.tp) : 0.0;
      r.rq = static_cast<double>(s.tp) / denom;
    }
    report.per_category.push_back(r);
    if (!r.populated && !options.average_over_full_vocabulary) continue;
    all.Add(r, 1.0);
    (categories[c].thing ? things : stuff).Add(r, 1.0);
    (categories[c].seen ? seen : unseen).Add(r, 1.0);
    if (s.gt_segments > 0) weighted.Add(r, static_cast<double>(s.gt_segments));
  }
  report.all = all.Finish();
  report.things = things.Finish();
  report.stuff = stuff.Finish();
  report.seen = seen.Finish();
  report.unseen = unseen.Finish();
  report.gt_weighted = weighted.Finish();
  return report;
}

PqReport PanopticQuality(const PanopticMap& pred, const PanopticMap& gt,
                         std::span<const Category> categories,
                         const PqOptions& options) {
  return SummarizePq(AccumulatePq(pred, gt, categories.size()), categories,
                     options);
}

PqAggregate CombineAggregates(std::span<const PqAggregate> parts) {
  PqAggregate out;
  for (const PqAggregate& a : parts) {
    out.pq += a.n * a.pq;
    out.sq += a.n * a.sq;
    out.rq += a.n * a.rq;
    out.n += a.n;
  }
  if (out.n > 0) {
    out.pq /= out.n;
    out.sq /= out.n;
    out.rq /= out.n;
  }
  return out;
}

SemanticLabels SemanticFromPanoptic(const PanopticMap& map) {
  std::map<std::uint32_t, int> category_of;
  for (const Segment& s : map.segments) category_of[s.id] = s.category;
  SemanticLabels out;
  out.category.assign(map.pixels(), 0);
  out.is_void.assign(map.pixels(), 0);
  for (std::size_t p = 0; p < map.pixels(); ++p) {
    const std::uint32_t id = map.segment_ids[p];
    auto it = category_of.find(id);
    if (id == 0 || it == category_of.end()) {
      out.is_void[p] = 1;
    } else {
      out.category[p] = it->second;
    }
  }
  return out;
}

MiouResult Miou(std::span<const int> pred, std::span<const int> gt,
                std::span<const std::uint8_t> gt_void, int num_categories) {
  if (pred.size() != gt.size() || gt_void.size() != gt.size()) {
    throw Error(ErrorCode::kShape, "semantic maps differ in size");
  }
  if (num_categories < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_categories must be >= 1");
  }
  std::vector<std::int64_t> inter(num_categories, 0), pred_n(num_categories, 0),
      gt_n(num_categories, 0);
  for (std::size_t p = 0; p < gt.size(); ++p) {
    if (gt_void[p]) continue;
    const int a = pred[p];
    const int b = gt[p];
    if (a < 0 || a >= num_categories || b < 0 || b >= num_categories) {
      throw Error(ErrorCode::kRange, "semantic label outside the vocabulary");
    }
    ++pred_n[a];
    ++gt_n[b];
    if (a == b) ++inter[a];
  }
  MiouResult out;
  out.iou.assign(num_categories, std::numeric_limits<double>::quiet_NaN());
  out.in_gt.assign(num_categories, false);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < num_categories; ++c) {
    const std::int64_t uni = pred_n[c] + gt_n[c] - inter[c];
    if (uni > 0) {
      out.iou[c] = static_cast<double>(inter[c]) / static_cast<double>(uni);
    }
    if (gt_n[c] > 0) {
      out.in_gt[c] = true;
      sum += out.iou[c];
      ++present;
    }
  }
  out.mean = present > 0 ? sum / present : 0.0;
  return out;
}

}  // namespace coatseg
