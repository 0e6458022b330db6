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

// Fixtures and brute-force oracles shared by the test suites. Oracles
// recompute results by a different route than the library code.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "agr/agr.hpp"

namespace agr::testing {

inline Case make_case(CaseId id, double duration, double persons, int accommodation, int season,
                      const std::string& type, const std::string& destination,
                      const std::string& transport, double price, const std::string& hotel) {
  Case c;
  c.id = id;
  c.values = {duration, persons, static_cast<double>(accommodation), static_cast<double>(season),
              type, destination, transport, price};
  c.hotel = {hotel, accommodation, destination};
  return c;
}

// Six cases around a Rome city break. A is the query's twin; B and C
// differ in one problem feature; D is close but priced far above the
// budget; E shares A's solution but sits far away in problem space; F is
// unrelated.
inline CaseBase six_case_fixture() {
  return CaseBase(FeatureSchema::travel(),
                  {make_case(1, 7, 2, 3, 7, "City", "Rome", "Plane", 800, "Rome Forum"),
                   make_case(2, 7, 2, 3, 8, "City", "Rome", "Plane", 800, "Rome Forum"),
                   make_case(3, 7, 2, 3, 7, "Bathing", "Rome", "Plane", 800, "Rome Forum"),
                   make_case(4, 7, 2, 3, 6, "City", "Rome", "Car", 1500, "Rome Tiber"),
                   make_case(5, 14, 2, 3, 1, "City", "Rome", "Plane", 800, "Rome Tiber"),
                   make_case(6, 3, 4, 1, 12, "Skiing", "Oslo", "Train", 600, "Oslo Fjord")});
}

inline Query fixture_query(const CaseBase& cb, double budget) {
  return query_from_case(cb[0], cb.schema(), budget);
}

namespace oracle {

inline std::vector<double> present_numbers(const CaseBase& cb, std::size_t f) {
  std::vector<double> xs;
  for (const Case& c : cb.cases())
    if (std::holds_alternative<double>(c.values[f])) xs.push_back(std::get<double>(c.values[f]));
  return xs;
}

// Two-pass sample standard deviation.
inline double sigma(const CaseBase& cb, std::size_t f) {
  const auto xs = present_numbers(cb, f);
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Scalar local distance written out case by case.
inline double local(const Feature& f, const FeatureValue& a, const FeatureValue& b, double sig,
                    double maxd) {
  if (std::holds_alternative<Missing>(a) || std::holds_alternative<Missing>(b)) return maxd;
  if (f.kind.tag == KindTag::categorical)
    return std::get<std::string>(a) == std::get<std::string>(b) ? 0.0 : 1.0;
  const double x = std::get<double>(a);
  const double y = std::get<double>(b);
  if (f.kind.tag == KindTag::cyclic) {
    const double r = f.kind.extent;
    double best = r;
    for (double shift : {-r, 0.0, r}) best = std::min(best, std::fabs(x - y + shift));
    return best;
  }
  if (sig == 0.0) return x == y ? 0.0 : 1.0;
  return std::fabs(x - y) / sig;
}

// Maximum local distance over every pair of cases with both values present.
inline double max_distance(const CaseBase& cb, std::size_t f) {
  const Feature& feat = cb.schema()[f];
  const double sig = feat.kind.is_standardized() ? sigma(cb, f) : 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < cb.size(); ++i)
    for (std::size_t j = i + 1; j < cb.size(); ++j) {
      const auto& a = cb[i].values[f];
      const auto& b = cb[j].values[f];
      if (is_missing(a) || is_missing(b)) continue;
      best = std::max(best, local(feat, a, b, sig, 0.0));
    }
  return best > 0.0 ? best : 1.0;
}

inline double weighted_distance(const FeatureSchema& schema, const CaseBaseStats& stats,
                                const std::vector<FeatureValue>& a,
                                const std::vector<FeatureValue>& b, bool solution) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const Feature& feat = schema[f];
    const double w = solution ? feat.solution_weight
                              : (feat.role == Role::problem ? feat.structural_weight : 0.0);
    if (w == 0.0) continue;
    num += w * local(feat, a[f], b[f], stats.features[f].sigma, stats.features[f].max_distance);
    den += w;
  }
  return num / den;
}

// Ranking by a full sort over (-similarity, id).
inline std::vector<CaseId> knn(const Query& q, const CaseBase& cb, std::size_t k) {
  std::vector<std::pair<double, CaseId>> all;
  for (const Case& c : cb.cases())
    all.emplace_back(-1.0 / (1.0 + weighted_distance(cb.schema(), cb.stats(), q.values, c.values,
                                                     false)),
                     c.id);
  std::sort(all.begin(), all.end());
  std::vector<CaseId> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
  return out;
}

// Connected components by union-find, each sorted, listed by smallest member.
inline std::vector<std::vector<std::size_t>> components(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  std::sort(out.begin(), out.end());
  return out;
}

// Marginals by enumerating the whole graph at once. `weights` holds
// (a, b, s) triples, `clamp` a 0-based state or -1 per node.
inline std::vector<std::vector<double>> marginals(
    std::size_t n, int l, const std::vector<std::tuple<std::size_t, std::size_t, double>>& weights,
    const std::vector<int>& clamp) {
  std::vector<std::vector<double>> acc(n, std::vector<double>(l, 0.0));
  std::vector<int> x(n, 0);
  double z = 0.0;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(l);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    bool consistent = true;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<int>(rest % l);
      rest /= l;
      if (clamp[i] >= 0 && clamp[i] != x[i]) consistent = false;
    }
    if (!consistent) continue;
    double logw = 0.0;
    for (const auto& [a, b, s] : weights) logw -= s * std::abs(x[a] - x[b]);
    const double w = std::exp(logw);
    z += w;
    for (std::size_t i = 0; i < n; ++i) acc[i][x[i]] += w;
  }
  for (auto& row : acc)
    for (double& v : row) v /= z;
  return acc;
}

// Multiple correlation via modified Gram-Schmidt on the centered design
// (drop-first indicators), R^2 = |Q^T y|^2 / |y|^2.
inline double multiple_correlation(const CaseBase& cb, const std::vector<std::string>& predictors,
                                   const std::string& target) {
  const auto& schema = cb.schema();
  const std::size_t t = schema.index_of(target);
  std::vector<std::vector<double>> columns;
  for (const auto& name : predictors) {
    const std::size_t f = schema.index_of(name);
    if (schema[f].kind.is_label()) {
      std::set<std::string> labels;
      for (const Case& c : cb.cases()) labels.insert(std::get<std::string>(c.values[f]));
      for (auto it = std::next(labels.begin()); it != labels.end(); ++it) {
        std::vector<double> col;
        for (const Case& c : cb.cases()) col.push_back(std::get<std::string>(c.values[f]) == *it);
        columns.push_back(col);
      }
    } else {
      std::vector<double> col;
      for (const Case& c : cb.cases()) col.push_back(std::get<double>(c.values[f]));
      columns.push_back(col);
    }
  }
  std::vector<double> y;
  for (const Case& c : cb.cases()) y.push_back(std::get<double>(c.values[t]));
  auto center = [](std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= m;
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  center(y);
  std::vector<std::vector<double>> q;
  for (auto col : columns) {
    center(col);
    for (const auto& e : q) {
      const double p = dot(col, e);
      for (std::size_t i = 0; i < col.size(); ++i) col[i] -= p * e[i];
    }
    const double norm = std::sqrt(dot(col, col));
    if (norm < 1e-9) continue;
    for (double& v : col) v /= norm;
    q.push_back(col);
  }
  double explained = 0.0;
  for (const auto& e : q) explained += dot(e, y) * dot(e, y);
  return std::sqrt(explained / dot(y, y));
}

}  // namespace oracle
}  // namespace agr::testing
