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

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "agr/error.hpp"
#include "agr/evaluation.hpp"
#include "agr/inference.hpp"
#include "agr/model.hpp"
#include "agr/random.hpp"

namespace agr {

using Json = nlohmann::json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// {"features": [{"name": "Duration", "kind": "numeric", "role": "problem",
//   "weight": 1, "solution_weight": 0}, {"kind": "cyclic", "range": 12}, ...]}
inline FeatureSchema schema_from_json(const Json& j) {
  try {
    std::vector<Feature> features;
    for (const Json& f : j.at("features")) {
      Feature feat;
      feat.name = f.at("name").get<std::string>();
      const auto kind = f.at("kind").get<std::string>();
      if (kind == "numeric") feat.kind = FeatureKind::numeric();
      else if (kind == "ordinal") feat.kind = FeatureKind::ordinal(f.at("levels").get<int>());
      else if (kind == "cyclic") feat.kind = FeatureKind::cyclic(f.at("range").get<int>());
      else if (kind == "categorical") feat.kind = FeatureKind::categorical();
      else throw ConfigError("feature " + feat.name + ": unknown kind " + kind);
      const auto role = f.value("role", std::string("problem"));
      if (role == "problem") feat.role = Role::problem;
      else if (role == "solution") feat.role = Role::solution;
      else throw ConfigError("feature " + feat.name + ": unknown role " + role);
      feat.structural_weight = f.value("weight", feat.role == Role::problem ? 1.0 : 0.0);
      feat.solution_weight = f.value("solution_weight", 0.0);
      features.push_back(std::move(feat));
    }
    FeatureSchema schema(std::move(features));
    TravelFields check(schema);  // the rules and CSV layout need the Travel names
    (void)check;
    return schema;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("schema config: ") + e.what());
  }
}

inline Json schema_to_json(const FeatureSchema& s) {
  Json features = Json::array();
  for (const Feature& f : s.features()) {
    Json j{{"name", f.name},
           {"kind", std::string(to_string(f.kind.tag))},
           {"role", f.role == Role::problem ? "problem" : "solution"},
           {"weight", f.structural_weight},
           {"solution_weight", f.solution_weight}};
    if (f.kind.tag == KindTag::ordinal) j["levels"] = f.kind.extent;
    if (f.kind.tag == KindTag::cyclic) j["range"] = f.kind.extent;
    features.push_back(std::move(j));
  }
  return Json{{"features", features}};
}

// Every key is optional; absent keys keep the SweepConfig defaults.
inline SweepConfig sweep_from_json(const Json& j) {
  SweepConfig c;
  try {
    if (j.contains("alphas")) c.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("ks")) c.ks = j.at("ks").get<std::vector<std::size_t>>();
    c.folds = j.value("folds", c.folds);
    c.st = j.value("st", c.st);
    c.pt = j.value("pt", c.pt);
    c.seed = j.value("seed", c.seed);
    c.acceptance = j.value("acceptance", c.acceptance);
    if (j.contains("missingness")) {
      const Json& m = j.at("missingness");
      c.missingness.accommodation = m.value("accommodation", c.missingness.accommodation);
      c.missingness.duration = m.value("duration", c.missingness.duration);
      c.missingness.holiday_type = m.value("holiday_type", c.missingness.holiday_type);
    }
    const auto levels = j.value("levels", std::string("binary"));
    if (levels == "binary") c.levels = LevelMapping::binary();
    else if (levels == "four") c.levels = LevelMapping::four_level();
    else throw ConfigError("levels must be \"binary\" or \"four\"");
    c.inference.engine = parse_engine(j.value("engine", std::string("mean_field")));
    c.inference.tolerance = j.value("tolerance", c.inference.tolerance);
    c.inference.max_iterations = j.value("max_iterations", c.inference.max_iterations);
    c.inference.damping = j.value("damping", c.inference.damping);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  c.validate();
  return c;
}

inline Json sweep_to_json(const SweepConfig& c) {
  return Json{{"alphas", c.alphas},
              {"ks", c.ks},
              {"folds", c.folds},
              {"st", c.st},
              {"pt", c.pt},
              {"seed", c.seed},
              {"acceptance", c.acceptance},
              {"missingness",
               {{"accommodation", c.missingness.accommodation},
                {"duration", c.missingness.duration},
                {"holiday_type", c.missingness.holiday_type}}},
              {"levels", c.levels.mode == LevelMapping::Mode::binary ? "binary" : "four"},
              {"engine", std::string(to_string(c.inference.engine))},
              {"tolerance", c.inference.tolerance},
              {"max_iterations", c.inference.max_iterations},
              {"damping", c.inference.damping}};
}

// Hash of the normalized configuration (defaults filled in, keys sorted).
inline std::string config_hash(const Json& normalized) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(normalized.dump())));
  return buf;
}

}  // namespace agr
