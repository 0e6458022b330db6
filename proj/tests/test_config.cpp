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

#include "agr/agr.hpp"
#include "agr/config.hpp"

namespace {

using namespace agr;

TEST(SchemaJson, RoundTripsTravel) {
  const auto travel = FeatureSchema::travel();
  const auto back = schema_from_json(schema_to_json(travel));
  ASSERT_EQ(back.size(), travel.size());
  for (std::size_t i = 0; i < travel.size(); ++i) {
    EXPECT_EQ(back[i].name, travel[i].name);
    EXPECT_EQ(back[i].kind, travel[i].kind);
    EXPECT_EQ(back[i].role, travel[i].role);
    EXPECT_EQ(back[i].structural_weight, travel[i].structural_weight);
    EXPECT_EQ(back[i].solution_weight, travel[i].solution_weight);
  }
}

TEST(SchemaJson, WeightsOverridable) {
  auto j = schema_to_json(FeatureSchema::travel());
  j["features"][0]["weight"] = 3.0;
  EXPECT_EQ(schema_from_json(j).structural_weight_sum(), 9.0);
  j["features"][0]["kind"] = "fuzzy";
  EXPECT_THROW(schema_from_json(j), ConfigError);
  EXPECT_THROW(schema_from_json(Json::object()), ConfigError);
}

TEST(SweepJson, DefaultsAndOverrides) {
  const auto empty = sweep_from_json(Json::object());
  EXPECT_EQ(empty.folds, 10u);
  EXPECT_EQ(empty.ks, default_k_grid());
  const auto j = Json::parse(R"({"alphas": [1.0], "ks": [5, 10], "folds": 4, "seed": 9,
                                 "levels": "four", "engine": "loopy_bp",
                                 "missingness": {"duration": 0.5}})");
  const auto cfg = sweep_from_json(j);
  EXPECT_EQ(cfg.alphas, std::vector<double>{1.0});
  EXPECT_EQ(cfg.folds, 4u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.levels.num_levels(), 4);
  EXPECT_EQ(cfg.inference.engine, Engine::loopy_bp);
  EXPECT_EQ(cfg.missingness.duration, 0.5);
  EXPECT_EQ(cfg.missingness.accommodation, 0.15);
  EXPECT_EQ(sweep_from_json(sweep_to_json(cfg)).ks, cfg.ks);
}

TEST(SweepJson, InvalidValuesAreConfigErrors) {
  EXPECT_THROW(sweep_from_json(Json::parse(R"({"pt": 1.5})")), ConfigError);
  EXPECT_THROW(sweep_from_json(Json::parse(R"({"folds": "ten"})")), ConfigError);
  EXPECT_THROW(sweep_from_json(Json::parse(R"({"levels": "three"})")), ConfigError);
}

TEST(ConfigHash, StableAndSensitive) {
  const auto a = sweep_to_json(SweepConfig{});
  SweepConfig other;
  other.seed = 2;
  EXPECT_EQ(config_hash(a), config_hash(sweep_to_json(SweepConfig{})));
  EXPECT_NE(config_hash(a), config_hash(sweep_to_json(other)));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Random, PortableStreams) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.bits(), b.bits());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}

}  // namespace
