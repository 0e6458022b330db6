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
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agr/error.hpp"
#include "agr/model.hpp"

namespace agr {

// Positions of the Travel features the adaptation rules and the CSV
// layout refer to by name.
struct TravelFields {
  std::size_t duration, persons, accommodation, season, holiday_type, destination, transport,
      price;

  explicit TravelFields(const FeatureSchema& s)
      : duration(s.index_of("Duration")),
        persons(s.index_of("Persons")),
        accommodation(s.index_of("Accommodation")),
        season(s.index_of("Season")),
        holiday_type(s.index_of("HolidayType")),
        destination(s.index_of("Destination")),
        transport(s.index_of("Transport")),
        price(s.index_of("Price")) {
    if (s[price].role != Role::solution) throw ConfigError("Price must have the solution role");
  }
};

inline double price_of(const Case& c, const TravelFields& f) {
  return std::get<double>(c.values[f.price]);
}

// Returns an empty string when the case satisfies every invariant,
// otherwise a description of the first violation.
inline std::string case_violation(const FeatureSchema& schema, const Case& c) {
  if (c.values.size() != schema.size()) return "wrong number of values";
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!in_domain(schema[i], c.values[i]))
      return "value of " + schema[i].name + " outside its domain";
  }
  const TravelFields f(schema);
  const auto* price = std::get_if<double>(&c.values[f.price]);
  if (price == nullptr || !(*price > 0.0)) return "Price must be present and > 0";
  const auto* persons = std::get_if<double>(&c.values[f.persons]);
  if (persons == nullptr || !(*persons > 0.0)) return "Persons must be present and > 0";
  const auto* category = std::get_if<double>(&c.values[f.accommodation]);
  if (category == nullptr || *category != c.hotel.category)
    return "HotelCategory must equal Accommodation";
  const auto* destination = std::get_if<std::string>(&c.values[f.destination]);
  if (destination == nullptr || *destination != c.hotel.location)
    return "HotelLocation must equal Destination";
  if (c.hotel.name.empty()) return "Hotel name is empty";
  return {};
}

class CaseBase {
 public:
  CaseBase(FeatureSchema schema, std::vector<Case> cases)
      : schema_(std::move(schema)), cases_(std::move(cases)) {
    std::sort(cases_.begin(), cases_.end(),
              [](const Case& a, const Case& b) { return a.id < b.id; });
    index_.reserve(cases_.size());
    for (std::size_t i = 0; i < cases_.size(); ++i) {
      if (!index_.emplace(cases_[i].id, i).second)
        throw DataError("duplicate case id " + std::to_string(cases_[i].id));
      if (auto why = case_violation(schema_, cases_[i]); !why.empty())
        throw DataError("case " + std::to_string(cases_[i].id) + ": " + why);
    }
  }

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<Case>& cases() const { return cases_; }
  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  const Case& operator[](std::size_t i) const { return cases_[i]; }

  std::optional<std::size_t> index_of(CaseId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool has_stats() const { return stats_.has_value(); }
  const CaseBaseStats& stats() const {
    if (!stats_) throw ComputeError("case base statistics not computed");
    return *stats_;
  }
  void set_stats(CaseBaseStats stats) { stats_ = std::move(stats); }

  // Ids form one contiguous run.
  bool ids_dense() const {
    return cases_.empty() ||
           cases_.back().id - cases_.front().id + 1 == static_cast<CaseId>(cases_.size());
  }

  // Subset by position; the result has no statistics attached.
  CaseBase subset(const std::vector<std::size_t>& positions) const {
    std::vector<Case> picked;
    picked.reserve(positions.size());
    for (std::size_t p : positions) picked.push_back(cases_.at(p));
    return CaseBase(schema_, std::move(picked));
  }

 private:
  FeatureSchema schema_;
  std::vector<Case> cases_;
  std::unordered_map<CaseId, std::size_t> index_;
  std::optional<CaseBaseStats> stats_;
};

// Sample standard deviation, maximum observed pairwise local distance,
// mean price and mean pairwise structural similarity. A feature whose
// observed maximum is zero (constant or absent) gets max_distance 1.
inline CaseBaseStats compute_stats(const CaseBase& cb) {
  if (cb.size() < 2) throw DataError("statistics need at least two cases");
  const FeatureSchema& schema = cb.schema();
  const TravelFields fields(schema);
  CaseBaseStats stats;
  stats.features.resize(schema.size());

  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Feature& f = schema[i];
    FeatureStats& fs = stats.features[i];
    double observed_max = 0.0;
    if (f.kind.is_label()) {
      std::set<std::string> labels;
      for (const Case& c : cb.cases())
        if (const auto* s = std::get_if<std::string>(&c.values[i])) labels.insert(*s);
      observed_max = labels.size() >= 2 ? 1.0 : 0.0;
    } else {
      std::vector<double> xs;
      for (const Case& c : cb.cases())
        if (const auto* x = std::get_if<double>(&c.values[i])) xs.push_back(*x);
      if (f.kind.tag == KindTag::cyclic) {
        std::set<double> distinct(xs.begin(), xs.end());
        for (double a : distinct)
          for (double b : distinct)
            observed_max = std::max(observed_max, cyclic_distance(a, b, f.kind.extent));
      } else {
        double sigma = 0.0;
        if (xs.size() >= 2) {
          double mean = 0.0;
          for (double x : xs) mean += x;
          mean /= static_cast<double>(xs.size());
          double ss = 0.0;
          for (double x : xs) ss += (x - mean) * (x - mean);
          sigma = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        }
        fs.sigma = sigma;
        if (sigma > 0.0) {
          auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
          observed_max = (*hi - *lo) / sigma;
        }
      }
    }
    fs.max_distance = observed_max > 0.0 ? observed_max : 1.0;
  }

  double price_sum = 0.0;
  for (const Case& c : cb.cases()) price_sum += price_of(c, fields);
  stats.mean_price = price_sum / static_cast<double>(cb.size());

  // Row partials summed in row order: the result does not depend on how
  // rows would be split across workers.
  const std::size_t n = cb.size();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j)
      row += similarity(structural_distance(schema, stats, cb[i].values, cb[j].values));
    total += row;
  }
  stats.mean_similarity = total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  return stats;
}

inline CaseBase with_stats(CaseBase cb) {
  cb.set_stats(compute_stats(cb));
  return cb;
}

// Hotels available in the library, per (category, location), in
// ascending case-id order of first appearance.
class HotelIndex {
 public:
  explicit HotelIndex(const CaseBase& cb) {
    for (const Case& c : cb.cases()) {
      auto& list = pockets_[{c.hotel.category, c.hotel.location}];
      if (std::find(list.begin(), list.end(), c.hotel) == list.end()) list.push_back(c.hotel);
    }
  }

  // First hotel in the pocket whose name differs from `excluded`.
  std::optional<Hotel> alternative(int category, const std::string& location,
                                   const std::string& excluded) const {
    auto it = pockets_.find({category, location});
    if (it == pockets_.end()) return std::nullopt;
    for (const Hotel& h : it->second)
      if (h.name != excluded) return h;
    return std::nullopt;
  }

  std::size_t distinct_in(int category, const std::string& location) const {
    auto it = pockets_.find({category, location});
    if (it == pockets_.end()) return 0;
    std::set<std::string> names;
    for (const Hotel& h : it->second) names.insert(h.name);
    return names.size();
  }

  const std::map<std::pair<int, std::string>, std::vector<Hotel>>& pockets() const {
    return pockets_;
  }

 private:
  std::map<std::pair<int, std::string>, std::vector<Hotel>> pockets_;
};

inline Query query_from_case(const Case& c, const FeatureSchema& schema, double budget) {
  Query q;
  q.id = c.id;
  q.values = c.values;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].role == Role::solution) q.values[i] = Missing{};
  q.budget = budget;
  return q;
}

inline void validate_query(const FeatureSchema& schema, const Query& q) {
  if (q.values.size() != schema.size()) throw DataError("query does not match schema");
  bool any = false;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!in_domain(schema[i], q.values[i]))
      throw DataError("query value of " + schema[i].name + " outside its domain");
    if (schema[i].role == Role::problem && !is_missing(q.values[i])) any = true;
  }
  if (!any) throw DataError("query has no present feature");
  if (!(q.budget > 0.0)) throw DataError("query budget must be positive");
}

}  // namespace agr
