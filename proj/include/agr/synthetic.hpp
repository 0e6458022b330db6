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

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "agr/case_base.hpp"
#include "agr/error.hpp"
#include "agr/model.hpp"
#include "agr/random.hpp"

namespace agr {

namespace travel {

inline constexpr std::string_view kTrain = "Train";
inline constexpr std::string_view kCoach = "Coach";

struct Level {
  std::string_view name;
  double factor;  // price multiplier (or per-person fare for transport)
  double weight;  // sampling weight
};

inline constexpr std::array<Level, 12> kDestinations{{
    {"Alps", 1.15, 1.0},          {"Baltic Sea", 0.85, 1.0},   {"Black Forest", 0.90, 0.8},
    {"Canary Islands", 1.10, 1.2}, {"Corsica", 1.05, 0.8},     {"Crete", 1.00, 1.0},
    {"Cyprus", 1.05, 0.7},         {"Egypt", 0.95, 0.9},       {"Madeira", 1.10, 0.7},
    {"Malta", 1.00, 0.8},          {"Tyrol", 1.20, 1.0},       {"Tunisia", 0.80, 0.9},
}};

inline constexpr std::array<Level, 8> kHolidayTypes{{
    {"Active", 1.00, 1.0},   {"Bathing", 0.90, 2.0},    {"City", 1.30, 1.2},
    {"Education", 1.15, 0.5}, {"Language", 1.10, 0.5},  {"Recreation", 0.95, 1.5},
    {"Skiing", 1.35, 0.8},    {"Wandering", 0.85, 1.0},
}};

inline constexpr std::array<Level, 4> kTransports{{
    {"Car", 30.0, 1.5}, {"Coach", 80.0, 1.0}, {"Train", 130.0, 1.0}, {"Plane", 250.0, 2.0},
}};

// Per person per night, indexed by Accommodation category 0..5.
inline constexpr std::array<double, 6> kNightlyRate{22.0, 34.0, 50.0, 72.0, 100.0, 140.0};
inline constexpr std::array<double, 6> kCategoryWeight{0.4, 0.8, 1.4, 1.6, 1.0, 0.5};

inline constexpr std::array<double, 7> kDurations{3, 5, 7, 10, 14, 18, 21};
inline constexpr std::array<double, 7> kDurationWeight{0.8, 1.0, 2.0, 1.2, 1.8, 0.5, 0.7};

inline constexpr std::array<double, 6> kPersons{1, 2, 3, 4, 5, 6};
inline constexpr std::array<double, 6> kPersonsWeight{0.8, 7.0, 0.8, 0.8, 0.1, 0.05};

inline double season_factor(int month) {
  if (month == 7 || month == 8 || month == 12) return 1.15;
  if (month == 6 || month == 9) return 1.05;
  return 1.0;
}

}  // namespace travel

// Seeded synthetic Travel case base. Every (Destination, category)
// pocket in use holds at least two cases and, through round-robin hotel
// assignment, at least two distinct hotels.
inline CaseBase generate_synthetic(std::size_t n, std::uint64_t seed,
                                   const FeatureSchema& schema = FeatureSchema::travel()) {
  using namespace travel;
  if (n < 50) throw ConfigError("n too small to satisfy the hotel-pocket constraint (need n >= 50)");
  const TravelFields f(schema);
  Rng rng(mix_keys(seed, 0x7472'6176'656cULL));

  std::vector<std::pair<int, int>> pockets;  // (destination, category)
  for (int d = 0; d < static_cast<int>(kDestinations.size()); ++d)
    for (int c = 0; c < 6; ++c) pockets.emplace_back(d, c);
  rng.shuffle(pockets);
  pockets.resize(std::min(pockets.size(), n / 4));
  std::vector<double> pocket_weight;
  for (auto [d, c] : pockets) pocket_weight.push_back(kDestinations[d].weight * kCategoryWeight[c]);

  std::vector<std::size_t> assignment;
  for (std::size_t i = 0; i < 2 * pockets.size(); ++i) assignment.push_back(i % pockets.size());
  while (assignment.size() < n) assignment.push_back(rng.weighted(pocket_weight));
  rng.shuffle(assignment);

  auto weights_of = [](const auto& levels) {
    std::vector<double> w;
    for (const auto& l : levels) w.push_back(l.weight);
    return w;
  };
  const auto type_w = weights_of(kHolidayTypes);
  const auto transport_w = weights_of(kTransports);
  const std::vector<double> duration_w(kDurationWeight.begin(), kDurationWeight.end());
  const std::vector<double> persons_w(kPersonsWeight.begin(), kPersonsWeight.end());

  std::vector<Case> cases(n);
  std::map<std::pair<int, int>, int> pocket_fill;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [d, category] = pockets[assignment[i]];
    const double duration = kDurations[rng.weighted(duration_w)];
    const double persons = kPersons[rng.weighted(persons_w)];
    const int season = 1 + static_cast<int>(rng.below(12));
    const auto& type = kHolidayTypes[rng.weighted(type_w)];
    const auto& transport = kTransports[rng.weighted(transport_w)];
    const auto& destination = kDestinations[d];

    const double per_person = duration * kNightlyRate[category] * type.factor *
                                  destination.factor * season_factor(season) +
                              transport.factor;
    const double price = std::round(persons * per_person * std::exp(0.08 * rng.normal()));

    Case& c = cases[i];
    c.id = static_cast<CaseId>(i);
    c.values.assign(schema.size(), Missing{});
    c.values[f.duration] = duration;
    c.values[f.persons] = persons;
    c.values[f.accommodation] = static_cast<double>(category);
    c.values[f.season] = static_cast<double>(season);
    c.values[f.holiday_type] = std::string(type.name);
    c.values[f.destination] = std::string(destination.name);
    c.values[f.transport] = std::string(transport.name);
    c.values[f.price] = std::max(price, 1.0);

    const int slot = pocket_fill[{d, category}]++ % 3;
    c.hotel.name = std::string(destination.name) + " " + std::string(1, "ABC"[slot]) +
                   std::to_string(category);
    c.hotel.category = category;
    c.hotel.location = std::string(destination.name);
  }
  return CaseBase(schema, std::move(cases));
}

// Solves the dense symmetric system a x = b in place (partial pivoting).
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-12) throw ComputeError("singular design matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= m * a[col][k];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Multiple correlation coefficient R of an ordinary least-squares fit of
// `target` on `predictors`. Categorical predictors enter as indicator
// columns (first level dropped). Cases missing any involved value are
// skipped.
inline double multiple_correlation(const CaseBase& cb, const std::vector<std::string>& predictors,
                                   const std::string& target) {
  const FeatureSchema& schema = cb.schema();
  const std::size_t t = schema.index_of(target);
  std::vector<std::size_t> cols;
  for (const auto& p : predictors) cols.push_back(schema.index_of(p));

  std::vector<std::map<std::string, std::size_t>> levels(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (!schema[cols[k]].kind.is_label()) continue;
    for (const Case& c : cb.cases())
      if (const auto* s = std::get_if<std::string>(&c.values[cols[k]])) levels[k].emplace(*s, 0);
    std::size_t next = 0;
    for (auto& [label, slot] : levels[k]) slot = next++;
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (const Case& c : cb.cases()) {
    if (is_missing(c.values[t])) continue;
    std::vector<double> row;
    bool complete = true;
    for (std::size_t k = 0; k < cols.size() && complete; ++k) {
      const FeatureValue& v = c.values[cols[k]];
      if (is_missing(v)) {
        complete = false;
      } else if (schema[cols[k]].kind.is_label()) {
        const std::size_t slot = levels[k].at(std::get<std::string>(v));
        for (std::size_t j = 1; j < levels[k].size(); ++j) row.push_back(slot == j ? 1.0 : 0.0);
      } else {
        row.push_back(std::get<double>(v));
      }
    }
    if (!complete) continue;
    rows.push_back(std::move(row));
    y.push_back(std::get<double>(c.values[t]));
  }
  if (rows.empty()) throw ComputeError("no complete rows for correlation");
  const std::size_t p = rows.front().size();
  const double m = static_cast<double>(rows.size());

  // Centered normal equations; the intercept drops out.
  std::vector<double> mean_x(p, 0.0);
  double mean_y = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < p; ++j) mean_x[j] += rows[r][j] / m;
    mean_y += y[r] / m;
  }
  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  double syy = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double dy = y[r] - mean_y;
    syy += dy * dy;
    for (std::size_t i = 0; i < p; ++i) {
      const double di = rows[r][i] - mean_x[i];
      xty[i] += di * dy;
      for (std::size_t j = 0; j < p; ++j) xtx[i][j] += di * (rows[r][j] - mean_x[j]);
    }
  }
  if (!(syy > 0.0)) throw ComputeError("target has zero variance");
  const auto beta = solve_linear(xtx, xty);
  double explained = 0.0;
  for (std::size_t i = 0; i < p; ++i) explained += beta[i] * xty[i];
  return std::sqrt(std::clamp(explained / syy, 0.0, 1.0));
}

struct MissingnessProfile {
  double accommodation = 0.0;
  double duration = 0.0;
  double holiday_type = 0.0;

  static MissingnessProfile standard() { return {0.15, 0.3, 0.6}; }

  void validate() const {
    for (double p : {accommodation, duration, holiday_type})
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("missingness probability outside [0,1]");
  }
};

// Blanks Accommodation, Duration and HolidayType independently. The
// stream is keyed by (seed, query id), so the outcome does not depend on
// the order in which queries are processed.
inline Query inject_missing(Query q, const MissingnessProfile& profile, std::uint64_t seed,
                            const FeatureSchema& schema = FeatureSchema::travel()) {
  profile.validate();
  const TravelFields f(schema);
  Rng rng(mix_keys(seed, static_cast<std::uint64_t>(q.id)));
  const bool drop_accommodation = rng.uniform() < profile.accommodation;
  const bool drop_duration = rng.uniform() < profile.duration;
  const bool drop_holiday = rng.uniform() < profile.holiday_type;
  if (drop_accommodation) q.values[f.accommodation] = Missing{};
  if (drop_duration) q.values[f.duration] = Missing{};
  if (drop_holiday) q.values[f.holiday_type] = Missing{};
  return q;
}

}  // namespace agr
