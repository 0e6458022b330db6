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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agr/case_base.hpp"
#include "agr/error.hpp"
#include "agr/model.hpp"
#include "agr/random.hpp"
#include "agr/synthetic.hpp"

namespace agr {

enum class Rule : std::uint8_t { r1 = 1, r2 = 2, r3 = 4, r4 = 8 };

class RuleSet {
 public:
  RuleSet() = default;
  RuleSet(std::initializer_list<Rule> rules) {
    for (Rule r : rules) insert(r);
  }
  void insert(Rule r) { bits_ |= static_cast<std::uint8_t>(r); }
  bool contains(Rule r) const { return bits_ & static_cast<std::uint8_t>(r); }
  bool empty() const { return bits_ == 0; }
  bool operator==(const RuleSet&) const = default;

  std::string to_string() const {
    std::string s;
    for (auto [r, name] : {std::pair{Rule::r1, "R1"}, {Rule::r2, "R2"}, {Rule::r3, "R3"},
                           {Rule::r4, "R4"}})
      if (contains(r)) s += (s.empty() ? "" : "+") + std::string(name);
    return s.empty() ? "none" : s;
  }

 private:
  std::uint8_t bits_ = 0;
};

enum class FailurePoint { none, over_budget, no_alternative_hotel };

struct AdaptationOutcome {
  std::optional<Case> adapted;  // absent exactly when flagged
  RuleSet rules_applied;
  FailurePoint failure = FailurePoint::none;

  bool flagged_not_adaptable() const { return failure != FailurePoint::none; }
};

struct LevelMapping {
  enum class Mode { four_level, binary };
  Mode mode = Mode::binary;

  static LevelMapping binary() { return {Mode::binary}; }
  static LevelMapping four_level() { return {Mode::four_level}; }
  int num_levels() const { return mode == Mode::binary ? 2 : 4; }
};

inline int level_of(const AdaptationOutcome& o, LevelMapping m) {
  if (m.mode == LevelMapping::Mode::binary) return o.flagged_not_adaptable() ? 2 : 1;
  if (o.flagged_not_adaptable()) return 4;
  if (o.rules_applied.empty()) return 1;
  if (o.rules_applied == RuleSet{Rule::r1}) return 2;
  return 3;
}

// A customer's hotel acceptance criterion A(h).
class AcceptanceModel {
 public:
  using Predicate = std::function<bool(const std::string& hotel, CaseId query)>;

  static AcceptanceModel always() { return AcceptanceModel(Kind::always, 1.0, 0, {}); }

  static AcceptanceModel bernoulli(double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("acceptance probability outside [0,1]");
    return AcceptanceModel(Kind::bernoulli, p, seed, {});
  }

  static AcceptanceModel custom(Predicate pred) {
    if (!pred) throw ConfigError("empty acceptance predicate");
    return AcceptanceModel(Kind::custom, 0.0, 0, std::move(pred));
  }

  // Deterministic in (seed, hotel, query): the same pair always gets the
  // same verdict within one experiment.
  bool accepts(const std::string& hotel, CaseId query) const {
    switch (kind_) {
      case Kind::always: return true;
      case Kind::custom: return predicate_(hotel, query);
      case Kind::bernoulli: {
        const std::uint64_t key =
            mix_keys(mix_keys(seed_, fnv1a64(hotel)), static_cast<std::uint64_t>(query));
        return unit_interval(key) < p_;
      }
    }
    return true;
  }

  double probability() const { return p_; }

 private:
  enum class Kind { always, bernoulli, custom };
  AcceptanceModel(Kind kind, double p, std::uint64_t seed, Predicate pred)
      : kind_(kind), p_(p), seed_(seed), predicate_(std::move(pred)) {}

  Kind kind_;
  double p_;
  std::uint64_t seed_;
  Predicate predicate_;
};

inline bool evaluate_acceptance(const AcceptanceModel& model, const std::string& hotel,
                                CaseId query) {
  return model.accepts(hotel, query);
}

// Library-side data the rules consult: feature positions and the hotel
// directory used by R4.
class AdaptationLibrary {
 public:
  explicit AdaptationLibrary(const CaseBase& library)
      : fields_(library.schema()), hotels_(library) {}

  const TravelFields& fields() const { return fields_; }
  const HotelIndex& hotels() const { return hotels_; }

 private:
  TravelFields fields_;
  HotelIndex hotels_;
};

// Applies R1, R2, R3, the budget check and R4, in that order, to the
// retrieved case `r` for query `q`.
inline AdaptationOutcome adapt(const Case& r, const Query& q, double budget,
                               const AcceptanceModel& accept, const AdaptationLibrary& library) {
  const TravelFields& f = library.fields();
  AdaptationOutcome out;
  Case a = r;

  const double r_persons = std::get<double>(r.values[f.persons]);
  double price_per_person = std::get<double>(r.values[f.price]) / r_persons;

  // R1: a package can be used for fewer people.
  if (const auto* qp = std::get_if<double>(&q.values[f.persons]); qp && r_persons > *qp) {
    a.values[f.persons] = *qp;
    out.rules_applied.insert(Rule::r1);
  }

  const auto* r_transport = std::get_if<std::string>(&r.values[f.transport]);
  const auto* q_transport = std::get_if<std::string>(&q.values[f.transport]);
  if (r_transport && q_transport) {
    // R2: train instead of coach, 10% more per person.
    if (*r_transport == travel::kTrain && *q_transport == travel::kCoach) {
      a.values[f.transport] = std::string(travel::kTrain);
      price_per_person *= 1.1;
      out.rules_applied.insert(Rule::r2);
    }
    // R3: coach instead of train, 10% less per person.
    if (*r_transport == travel::kCoach && *q_transport == travel::kTrain) {
      a.values[f.transport] = std::string(travel::kCoach);
      price_per_person /= 1.1;
      out.rules_applied.insert(Rule::r3);
    }
  }

  const double price = price_per_person * std::get<double>(a.values[f.persons]);
  a.values[f.price] = price;
  if (price > budget) {
    out.failure = FailurePoint::over_budget;
    return out;
  }

  // R4: a rejected hotel is replaced by another one of the requested
  // category at the requested destination.
  if (!accept.accepts(r.hotel.name, q.id)) {
    const auto* q_category = std::get_if<double>(&q.values[f.accommodation]);
    const auto* q_destination = std::get_if<std::string>(&q.values[f.destination]);
    std::optional<Hotel> alt;
    if (q_category && q_destination)
      alt = library.hotels().alternative(static_cast<int>(*q_category), *q_destination,
                                         r.hotel.name);
    if (!alt) {
      out.failure = FailurePoint::no_alternative_hotel;
      return out;
    }
    a.values[f.accommodation] = static_cast<double>(alt->category);
    a.values[f.destination] = alt->location;
    a.hotel = *alt;
    out.rules_applied.insert(Rule::r4);
  }

  out.adapted = std::move(a);
  return out;
}

}  // namespace agr
