/*
 * Copyright 2026 The agr-cbr Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "agr/error.hpp"
#include "agr/model.hpp"

namespace agr {

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::int64_t positives = 0;  // P
  std::int64_t total = 0;      // N
};

struct Scores {
  ConfusionCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Precision is 1 for an empty retrieval, recall is 1 when there are no
// positives, F1 is 0 when precision and recall are both 0.
inline Scores score_counts(const ConfusionCounts& c) {
  Scores s;
  s.counts = c;
  s.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  s.recall = c.positives == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.positives);
  s.accuracy = c.total == 0 ? 1.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total);
  const double pr = s.precision + s.recall;
  s.f1 = pr == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / pr;
  return s;
}

// Binary classification of all N library cases: retrieved vs positive.
inline Scores score(std::span<const CaseId> retrieved, const std::unordered_set<CaseId>& positives,
                    std::int64_t total) {
  std::unordered_set<CaseId> seen;
  ConfusionCounts c;
  for (CaseId id : retrieved) {
    if (!seen.insert(id).second) throw ConfigError("duplicate id in retrieved set");
    if (positives.contains(id)) ++c.tp;
    else ++c.fp;
  }
  c.positives = static_cast<std::int64_t>(positives.size());
  c.fn = c.positives - c.tp;
  c.total = total;
  c.tn = total - c.tp - c.fp - c.fn;
  if (c.tn < 0) throw ConfigError("retrieved and positive sets exceed the library size");
  return score_counts(c);
}

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  std::size_t k = 0;  // 0 marks the synthetic endpoint
};

inline constexpr double kFullRecall = 0.999;

// Orders points by recall and, unless the largest observed recall is
// already ~1, closes the curve with the pessimistic point (1, P/N).
inline std::vector<PrPoint> pr_curve(std::vector<PrPoint> points, double positives, double total) {
  if (!(total > 0.0)) throw ConfigError("pr_curve: N must be positive");
  std::stable_sort(points.begin(), points.end(),
                   [](const PrPoint& a, const PrPoint& b) { return a.recall < b.recall; });
  double max_recall = 0.0;
  for (const auto& p : points) max_recall = std::max(max_recall, p.recall);
  if (points.empty() || max_recall < kFullRecall) points.push_back({1.0, positives / total, 0});
  return points;
}

inline bool has_synthetic_endpoint(std::span<const PrPoint> curve) {
  return !curve.empty() && curve.back().k == 0;
}

// Trapezoidal area over recall. With a synthetic endpoint this is a
// lower bound on the true area. A single point encloses nothing.
inline double auc(std::span<const PrPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].recall - curve[i - 1].recall) *
            (curve[i].precision + curve[i - 1].precision) / 2.0;
  return area;
}

}  // namespace agr
