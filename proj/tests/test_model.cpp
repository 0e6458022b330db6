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

#include <gtest/gtest.h>

#include <cmath>

#include "agr/agr.hpp"
#include "support.hpp"

namespace {

using namespace agr;
using agr::testing::make_case;
namespace oracle = agr::testing::oracle;

const FeatureSchema kSchema = FeatureSchema::travel();

FeatureStats plain(double sigma = 1.0, double maxd = 5.0) { return {sigma, maxd}; }

TEST(LocalDistance, CyclicWrapsAround) {
  const Feature& season = kSchema[kSchema.index_of("Season")];
  EXPECT_DOUBLE_EQ(local_distance(season, 1.0, 12.0, plain()), 1.0);
  EXPECT_DOUBLE_EQ(local_distance(season, 3.0, 9.0, plain()), 6.0);
  EXPECT_DOUBLE_EQ(local_distance(season, 2.0, 5.0, plain()), 3.0);
}

TEST(LocalDistance, OverlapOnLabels) {
  const Feature& type = kSchema[kSchema.index_of("HolidayType")];
  EXPECT_EQ(local_distance(type, std::string("City"), std::string("City"), plain()), 0.0);
  EXPECT_EQ(local_distance(type, std::string("City"), std::string("Bathing"), plain()), 1.0);
}

TEST(LocalDistance, StandardizedEuclidean) {
  const Feature& duration = kSchema[kSchema.index_of("Duration")];
  EXPECT_DOUBLE_EQ(local_distance(duration, 7.0, 14.0, plain(3.5)), 2.0);
}

TEST(LocalDistance, ConstantFeatureFallsBackToZeroOne) {
  const Feature& duration = kSchema[kSchema.index_of("Duration")];
  EXPECT_EQ(local_distance(duration, 7.0, 7.0, plain(0.0, 1.0)), 0.0);
  EXPECT_EQ(local_distance(duration, 7.0, 8.0, plain(0.0, 1.0)), 1.0);
}

TEST(LocalDistance, MissingGivesObservedMaximum) {
  const auto cb = with_stats(agr::testing::six_case_fixture());
  const std::size_t d = kSchema.index_of("Duration");
  const double maxd = oracle::max_distance(cb, d);
  EXPECT_NEAR(cb.stats().features[d].max_distance, maxd, 1e-12);
  EXPECT_NEAR(local_distance(kSchema, cb.stats(), "Duration", Missing{}, 7.0), maxd, 1e-12);
  EXPECT_NEAR(local_distance(kSchema, cb.stats(), "Duration", 7.0, Missing{}), maxd, 1e-12);
}

TEST(LocalDistance, UnknownFeatureAndMissingStatsAreErrors) {
  const auto cb = with_stats(agr::testing::six_case_fixture());
  EXPECT_THROW(local_distance(kSchema, cb.stats(), "Altitude", 1.0, 2.0), ConfigError);
  EXPECT_THROW(local_distance(kSchema, CaseBaseStats{}, "Duration", 1.0, 2.0), ComputeError);
  const Feature& duration = kSchema[kSchema.index_of("Duration")];
  EXPECT_THROW(local_distance(duration, 1.0, 2.0, FeatureStats{}), ComputeError);
}

TEST(StructuralDistance, IdenticalCasesAreZero) {
  const auto cb = with_stats(agr::testing::six_case_fixture());
  EXPECT_EQ(structural_distance(kSchema, cb.stats(), cb[0].values, cb[0].values), 0.0);
  EXPECT_EQ(similarity(0.0), 1.0);
}

TEST(StructuralDistance, SingleTransportDifferenceIsOneSeventh) {
  const auto cb = with_stats(agr::testing::six_case_fixture());
  auto other = cb[0].values;
  other[kSchema.index_of("Transport")] = std::string("Car");
  EXPECT_NEAR(structural_distance(kSchema, cb.stats(), cb[0].values, other), 1.0 / 7.0, 1e-15);
}

TEST(StructuralDistance, MatchesScalarOracleOnRandomPairs) {
  const auto cb = with_stats(generate_synthetic(120, 5));
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = cb[rng.below(cb.size())].values;
    const auto& b = cb[rng.below(cb.size())].values;
    for (std::size_t f = 0; f < a.size(); ++f)
      if (rng.bernoulli(0.2)) a[f] = Missing{};
    EXPECT_NEAR(structural_distance(kSchema, cb.stats(), a, b),
                oracle::weighted_distance(kSchema, cb.stats(), a, b, false), 1e-12);
  }
}

TEST(SolutionDistance, ZeroForSameSolution) {
  const auto cb = with_stats(agr::testing::six_case_fixture());
  EXPECT_EQ(solution_distance(kSchema, cb.stats(), cb[0], cb[1]), 0.0);
}

TEST(SolutionDistance, DestinationOnlyIsOneThird) {
  const auto cb = with_stats(agr::testing::six_case_fixture());
  Case moved = cb[0];
  moved.values[kSchema.index_of("Destination")] = std::string("Oslo");
  moved.hotel.location = "Oslo";
  EXPECT_NEAR(solution_distance(kSchema, cb.stats(), cb[0], moved), 1.0 / 3.0, 1e-15);
}

TEST(SolutionDistance, MatchesScalarOracle) {
  const auto cb = with_stats(generate_synthetic(80, 9));
  for (std::size_t i = 0; i < cb.size(); i += 7)
    for (std::size_t j = 0; j < cb.size(); j += 5)
      EXPECT_NEAR(solution_distance(kSchema, cb.stats(), cb[i], cb[j]),
                  oracle::weighted_distance(kSchema, cb.stats(), cb[i].values, cb[j].values, true),
                  1e-12);
}

TEST(Similarity, PointValues) {
  EXPECT_EQ(similarity(0.0), 1.0);
  EXPECT_EQ(similarity(1.0), 0.5);
  EXPECT_EQ(similarity(3.0), 0.25);
  EXPECT_THROW(similarity(-0.1), std::invalid_argument);
  EXPECT_THROW(similarity(std::nan("")), std::invalid_argument);
}

TEST(Similarity, StrictlyDecreasingInRange) {
  double prev = 2.0;
  for (double d = 0.0; d < 1e6; d = d * 1.7 + 0.01) {
    const double s = similarity(d);
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(Schema, RejectsInvalidDeclarations) {
  using F = Feature;
  EXPECT_THROW(FeatureSchema({F{"a", FeatureKind::numeric()}, F{"a", FeatureKind::numeric()}}),
               ConfigError);
  EXPECT_THROW(FeatureSchema({F{"a", FeatureKind::numeric(), Role::problem, 0.0, 1.0}}),
               ConfigError);
  EXPECT_THROW(FeatureSchema({F{"a", FeatureKind::cyclic(1), Role::problem, 1.0, 1.0}}),
               ConfigError);
  EXPECT_THROW(FeatureSchema({F{"a", FeatureKind::numeric(), Role::problem, -1.0, 1.0},
                              F{"b", FeatureKind::numeric(), Role::problem, 2.0, 1.0}}),
               ConfigError);
  EXPECT_THROW(FeatureSchema({F{"a", FeatureKind::numeric(), Role::problem, 1.0, 0.0}}),
               ConfigError);
}

TEST(Domain, OrdinalAndCyclicCodes) {
  const Feature& acc = kSchema[kSchema.index_of("Accommodation")];
  const Feature& season = kSchema[kSchema.index_of("Season")];
  EXPECT_TRUE(in_domain(acc, 0.0));
  EXPECT_TRUE(in_domain(acc, 5.0));
  EXPECT_FALSE(in_domain(acc, 6.0));
  EXPECT_FALSE(in_domain(acc, 2.5));
  EXPECT_TRUE(in_domain(season, 12.0));
  EXPECT_FALSE(in_domain(season, 0.0));
  EXPECT_FALSE(in_domain(season, std::string("May")));
  EXPECT_TRUE(in_domain(season, Missing{}));
}

// Property sweep over random values of every kind.
TEST(MetricProperties, SymmetryIdentityAndMissingDominance) {
  const auto cb = with_stats(generate_synthetic(200, 3));
  Rng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t f = rng.below(kSchema.size());
    const auto& a = cb[rng.below(cb.size())].values[f];
    const auto& b = cb[rng.below(cb.size())].values[f];
    const auto& st = cb.stats().features[f];
    const double ab = local_distance(kSchema[f], a, b, st);
    EXPECT_EQ(ab, local_distance(kSchema[f], b, a, st));
    EXPECT_EQ(local_distance(kSchema[f], a, a, st), 0.0);
    EXPECT_GE(local_distance(kSchema[f], a, Missing{}, st), ab);
  }
}

}  // namespace
