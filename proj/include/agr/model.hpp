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

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "agr/error.hpp"

namespace agr {

using CaseId = std::int64_t;

struct Missing {
  bool operator==(const Missing&) const = default;
};

// A feature value is absent, a number (numeric, ordinal code, cyclic
// position) or a categorical label.
using FeatureValue = std::variant<Missing, double, std::string>;

inline bool is_missing(const FeatureValue& v) { return std::holds_alternative<Missing>(v); }

enum class KindTag { numeric, ordinal, cyclic, categorical };

struct FeatureKind {
  KindTag tag = KindTag::numeric;
  // Ordinal: number of levels (codes 0..levels-1). Cyclic: range R_f
  // (positions 1..R_f). Unused otherwise.
  int extent = 0;

  static FeatureKind numeric() { return {KindTag::numeric, 0}; }
  static FeatureKind ordinal(int levels) { return {KindTag::ordinal, levels}; }
  static FeatureKind cyclic(int range) { return {KindTag::cyclic, range}; }
  static FeatureKind categorical() { return {KindTag::categorical, 0}; }

  bool is_label() const { return tag == KindTag::categorical; }
  bool is_standardized() const { return tag == KindTag::numeric || tag == KindTag::ordinal; }

  bool operator==(const FeatureKind&) const = default;
};

inline std::string_view to_string(KindTag tag) {
  switch (tag) {
    case KindTag::numeric: return "numeric";
    case KindTag::ordinal: return "ordinal";
    case KindTag::cyclic: return "cyclic";
    case KindTag::categorical: return "categorical";
  }
  return "?";
}

enum class Role { problem, solution };

struct Feature {
  std::string name;
  FeatureKind kind;
  Role role = Role::problem;
  double structural_weight = 1.0;  // problem features only
  double solution_weight = 0.0;    // > 0 marks a solution-relevant feature
};

// Ordered feature list. Problem-role features describe a case; features
// with a positive solution weight make up the solution distance.
class FeatureSchema {
 public:
  explicit FeatureSchema(std::vector<Feature> features) : features_(std::move(features)) {
    std::unordered_set<std::string> names;
    double structural = 0.0;
    double solution = 0.0;
    for (const auto& f : features_) {
      if (f.name.empty()) throw ConfigError("feature with empty name");
      if (!names.insert(f.name).second) throw ConfigError("duplicate feature name: " + f.name);
      if (f.kind.tag == KindTag::cyclic && f.kind.extent < 2)
        throw ConfigError("cyclic feature " + f.name + " needs range >= 2");
      if (f.kind.tag == KindTag::ordinal && f.kind.extent < 2)
        throw ConfigError("ordinal feature " + f.name + " needs >= 2 levels");
      if (!(f.structural_weight >= 0.0) || !(f.solution_weight >= 0.0) ||
          !std::isfinite(f.structural_weight) || !std::isfinite(f.solution_weight))
        throw ConfigError("feature " + f.name + " has a negative or non-finite weight");
      if (f.role == Role::solution && f.structural_weight > 0.0)
        throw ConfigError("solution feature " + f.name + " cannot carry a structural weight");
      if (f.role == Role::problem) structural += f.structural_weight;
      solution += f.solution_weight;
    }
    if (!(structural > 0.0)) throw ConfigError("schema needs a positive structural weight");
    if (!(solution > 0.0)) throw ConfigError("schema needs a positive solution weight");
    structural_sum_ = structural;
    solution_sum_ = solution;
  }

  // Travel case base: seven problem features plus the package price.
  // Uniform weights; solution distance over Price, Accommodation and
  // Destination.
  static FeatureSchema travel() {
    return FeatureSchema({
        {"Duration", FeatureKind::numeric(), Role::problem, 1.0, 0.0},
        {"Persons", FeatureKind::numeric(), Role::problem, 1.0, 0.0},
        {"Accommodation", FeatureKind::ordinal(6), Role::problem, 1.0, 1.0},
        {"Season", FeatureKind::cyclic(12), Role::problem, 1.0, 0.0},
        {"HolidayType", FeatureKind::categorical(), Role::problem, 1.0, 0.0},
        {"Destination", FeatureKind::categorical(), Role::problem, 1.0, 1.0},
        {"Transport", FeatureKind::categorical(), Role::problem, 1.0, 0.0},
        {"Price", FeatureKind::numeric(), Role::solution, 0.0, 1.0},
    });
  }

  const std::vector<Feature>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  const Feature& operator[](std::size_t i) const { return features_[i]; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
      if (features_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw ConfigError("unknown feature: " + std::string(name));
  }

  double structural_weight_sum() const { return structural_sum_; }
  double solution_weight_sum() const { return solution_sum_; }

 private:
  std::vector<Feature> features_;
  double structural_sum_ = 0.0;
  double solution_sum_ = 0.0;
};

struct Hotel {
  std::string name;
  int category = 0;
  std::string location;

  bool operator==(const Hotel&) const = default;
};

// Stored case. `values` is aligned with the schema's feature list, so
// it carries both problem features and Price.
struct Case {
  CaseId id = 0;
  std::vector<FeatureValue> values;
  Hotel hotel;

  bool operator==(const Case&) const = default;
};

// Query over the problem features; solution-role slots stay Missing.
struct Query {
  CaseId id = 0;
  std::vector<FeatureValue> values;
  double budget = 0.0;
};

struct FeatureStats {
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double max_distance = std::numeric_limits<double>::quiet_NaN();
};

struct CaseBaseStats {
  std::vector<FeatureStats> features;  // aligned with the schema
  double mean_price = 0.0;
  double mean_similarity = 0.0;  // mu_c over unordered case pairs

  bool operator==(const CaseBaseStats& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    if (features.size() != o.features.size()) return false;
    for (std::size_t i = 0; i < features.size(); ++i)
      if (!same(features[i].sigma, o.features[i].sigma) ||
          !same(features[i].max_distance, o.features[i].max_distance))
        return false;
    return mean_price == o.mean_price && mean_similarity == o.mean_similarity;
  }
};

namespace detail {

inline double number_of(const Feature& f, const FeatureValue& v) {
  if (const double* x = std::get_if<double>(&v)) return *x;
  throw DataError("feature " + f.name + " expects a number");
}

inline const std::string& label_of(const Feature& f, const FeatureValue& v) {
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  throw DataError("feature " + f.name + " expects a label");
}

}  // namespace detail

inline double cyclic_distance(double a, double b, int range) {
  const double diff = std::fabs(a - b);
  return std::min(diff, static_cast<double>(range) - diff);
}

// Checks a present value against the feature's declared domain.
inline bool in_domain(const Feature& f, const FeatureValue& v) {
  if (is_missing(v)) return true;
  if (f.kind.is_label()) return std::holds_alternative<std::string>(v);
  const double* x = std::get_if<double>(&v);
  if (x == nullptr || !std::isfinite(*x)) return false;
  switch (f.kind.tag) {
    case KindTag::ordinal:
      return *x == std::floor(*x) && *x >= 0 && *x < f.kind.extent;
    case KindTag::cyclic:
      return *x == std::floor(*x) && *x >= 1 && *x <= f.kind.extent;
    default:
      return true;
  }
}

// Per-feature local distance. Standardized Euclidean for numeric and
// ordinal features, overlap for categorical, cyclic for periodic ones.
// A missing operand yields the feature's maximum observed distance.
inline double local_distance(const Feature& f, const FeatureValue& a, const FeatureValue& b,
                             const FeatureStats& stats) {
  if (is_missing(a) || is_missing(b)) {
    if (std::isnan(stats.max_distance))
      throw ComputeError("statistics not computed for feature " + f.name);
    return stats.max_distance;
  }
  switch (f.kind.tag) {
    case KindTag::numeric:
    case KindTag::ordinal: {
      if (std::isnan(stats.sigma)) throw ComputeError("sigma undefined for feature " + f.name);
      const double x = detail::number_of(f, a);
      const double y = detail::number_of(f, b);
      if (stats.sigma == 0.0) return x == y ? 0.0 : 1.0;
      return std::fabs(x - y) / stats.sigma;
    }
    case KindTag::cyclic:
      return cyclic_distance(detail::number_of(f, a), detail::number_of(f, b), f.kind.extent);
    case KindTag::categorical:
      return detail::label_of(f, a) == detail::label_of(f, b) ? 0.0 : 1.0;
  }
  return 0.0;
}

// Name-based lookup, used at API boundaries.
inline double local_distance(const FeatureSchema& schema, const CaseBaseStats& stats,
                             std::string_view feature, const FeatureValue& a,
                             const FeatureValue& b) {
  const std::size_t i = schema.index_of(feature);
  if (i >= stats.features.size()) throw ComputeError("statistics not computed");
  return local_distance(schema[i], a, b, stats.features[i]);
}

// Weighted average of local distances over the problem features.
inline double structural_distance(const FeatureSchema& schema, const CaseBaseStats& stats,
                                  std::span<const FeatureValue> a,
                                  std::span<const FeatureValue> b) {
  if (a.size() != schema.size() || b.size() != schema.size())
    throw DataError("value vector does not match schema");
  if (stats.features.size() != schema.size()) throw ComputeError("statistics not computed");
  double acc = 0.0;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Feature& f = schema[i];
    if (f.role != Role::problem || f.structural_weight == 0.0) continue;
    acc += f.structural_weight * local_distance(f, a[i], b[i], stats.features[i]);
  }
  return acc / schema.structural_weight_sum();
}

// Weighted average of local distances over the solution-relevant features.
inline double solution_distance(const FeatureSchema& schema, const CaseBaseStats& stats,
                                const Case& a, const Case& b) {
  if (a.values.size() != schema.size() || b.values.size() != schema.size())
    throw DataError("value vector does not match schema");
  if (stats.features.size() != schema.size()) throw ComputeError("statistics not computed");
  double acc = 0.0;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Feature& f = schema[i];
    if (f.solution_weight == 0.0) continue;
    acc += f.solution_weight * local_distance(f, a.values[i], b.values[i], stats.features[i]);
  }
  return acc / schema.solution_weight_sum();
}

inline double similarity(double distance) {
  if (!(distance >= 0.0)) throw std::invalid_argument("similarity: distance must be >= 0");
  return 1.0 / (1.0 + distance);
}

}  // namespace agr
