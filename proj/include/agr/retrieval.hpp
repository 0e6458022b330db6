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
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "agr/adaptation.hpp"
#include "agr/case_base.hpp"
#include "agr/error.hpp"
#include "agr/inference.hpp"
#include "agr/model.hpp"
#include "agr/mrf.hpp"

namespace agr {

enum class Source { knn, mrf };

inline std::string_view to_string(Source s) { return s == Source::knn ? "KNN" : "MRF"; }

struct RankedCase {
  CaseId id = 0;
  double similarity = 0.0;  // structural similarity to the query
  Source source = Source::knn;
  std::optional<int> level;

  bool operator==(const RankedCase&) const = default;
};

// Maps a node belief to an asserted adaptation level, or rejects it.
struct CondSpec {
  enum class Mode { argmax, threshold_collapse };
  Mode mode = Mode::threshold_collapse;
  int max_level = 1;       // a: levels 1..a are collapsed
  double threshold = 0.9;  // pt

  static CondSpec argmax() { return {Mode::argmax, 1, 0.0}; }
  static CondSpec threshold_collapse(int a, double pt) {
    CondSpec c{Mode::threshold_collapse, a, pt};
    c.validate();
    return c;
  }

  void validate(int levels = 0) const {
    if (mode == Mode::argmax) return;
    if (max_level < 1 || (levels > 0 && max_level > levels))
      throw ConfigError("cond: collapsed level out of range");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("cond: pt must lie in (0,1)");
  }
};

inline std::optional<int> cond(std::span<const double> belief, const CondSpec& spec) {
  if (belief.empty()) return std::nullopt;
  if (spec.mode == CondSpec::Mode::argmax) {
    // max_element keeps the first maximum: ties go to the lowest level.
    return static_cast<int>(std::max_element(belief.begin(), belief.end()) - belief.begin()) + 1;
  }
  double mass = 0.0;
  const std::size_t upto = std::min<std::size_t>(belief.size(), spec.max_level);
  for (std::size_t j = 0; j < upto; ++j) mass += belief[j];
  if (mass > spec.threshold) return spec.max_level;
  return std::nullopt;
}

// Structural similarity of a query to every library case, plus the
// library positions ranked by descending similarity (ties: ascending id).
struct QueryScores {
  std::vector<double> similarity;
  std::vector<std::size_t> order;
};

inline QueryScores score_query(const Query& q, const CaseBase& library) {
  if (library.empty()) throw ConfigError("empty case base");
  const CaseBaseStats& stats = library.stats();
  QueryScores s;
  s.similarity.resize(library.size());
  for (std::size_t i = 0; i < library.size(); ++i)
    s.similarity[i] =
        similarity(structural_distance(library.schema(), stats, q.values, library[i].values));
  s.order.resize(library.size());
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  // Library positions follow ascending id, so position breaks ties.
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](std::size_t a, std::size_t b) { return s.similarity[a] > s.similarity[b]; });
  return s;
}

inline std::vector<RankedCase> knn_from_scores(const QueryScores& scores, const CaseBase& library,
                                               std::size_t k) {
  if (k < 1 || k > library.size()) throw ConfigError("k must lie in [1, |case base|]");
  std::vector<RankedCase> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = scores.order[r];
    out.push_back({library[i].id, scores.similarity[i], Source::knn, std::nullopt});
  }
  return out;
}

inline std::vector<RankedCase> knn_retrieve(const Query& q, const CaseBase& library,
                                            std::size_t k) {
  if (library.empty()) throw ConfigError("empty case base");
  return knn_from_scores(score_query(q, library), library, k);
}

struct Candidate {
  CaseId id = 0;
  int level = 0;
  bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
  std::vector<Candidate> candidates;  // ascending case id
  bool converged = true;
  int iterations = 0;
};

// Sets the retrieved levels as evidence, runs inference and keeps every
// non-evidenced node that passes cond().
inline CandidateSet mrf_candidates(const InferenceIndex& index, const Evidence& retrieved,
                                   const CondSpec& spec) {
  if (retrieved.empty()) throw ConfigError("mrf_candidates needs at least one evidenced case");
  spec.validate(index.mrf().levels());
  const auto result = index.run(retrieved);
  CandidateSet out{{}, result.converged, result.iterations};
  const MetricMrf& mrf = index.mrf();
  for (std::size_t n = 0; n < mrf.size(); ++n) {
    if (retrieved.contains(mrf.node_id(n))) continue;
    if (auto level = cond(result.beliefs.row(n), spec)) out.candidates.push_back({mrf.node_id(n), *level});
  }
  return out;
}

inline CandidateSet mrf_candidates(const MetricMrf& mrf, const Evidence& retrieved,
                                   const CondSpec& spec, const InferenceOptions& opts = {}) {
  return mrf_candidates(InferenceIndex(mrf, opts), retrieved, spec);
}

// Memoized adaptation of library cases to one query.
class QueryAdaptations {
 public:
  QueryAdaptations(const CaseBase& library, const AdaptationLibrary& rules, Query query,
                   AcceptanceModel acceptance, LevelMapping mapping)
      : library_(&library), rules_(&rules), query_(std::move(query)),
        acceptance_(std::move(acceptance)), mapping_(mapping), cache_(library.size()) {}

  const Query& query() const { return query_; }
  LevelMapping mapping() const { return mapping_; }

  const AdaptationOutcome& outcome(std::size_t position) {
    auto& slot = cache_.at(position);
    if (!slot) slot = adapt((*library_)[position], query_, query_.budget, acceptance_, *rules_);
    return *slot;
  }

  int level(std::size_t position) { return level_of(outcome(position), mapping_); }
  bool adaptable(std::size_t position) { return !outcome(position).flagged_not_adaptable(); }

 private:
  const CaseBase* library_;
  const AdaptationLibrary* rules_;
  Query query_;
  AcceptanceModel acceptance_;
  LevelMapping mapping_;
  std::vector<std::optional<AdaptationOutcome>> cache_;
};

struct HybridResult {
  std::vector<RankedCase> ranked;
  std::size_t adaptable_knn = 0;  // k'
  bool used_mrf = false;
  bool converged = true;
};

// kNN, then adaptation of the k retrieved cases. When some of them are
// not adaptable, their levels become MRF evidence and the best k - k'
// candidates (by structural similarity) replace the unadaptable ones.
// The result may be shorter than k when too few candidates pass.
inline HybridResult agr_retrieve(const QueryScores& scores, const CaseBase& library,
                                 const InferenceIndex& index, std::size_t k,
                                 const CondSpec& spec, QueryAdaptations& adaptations) {
  if (index.mrf().size() != library.size())
    throw ConfigError("MRF was not built over this case base");
  if (index.mrf().levels() != adaptations.mapping().num_levels())
    throw ConfigError("MRF state count does not match the level mapping");
  const auto knn = knn_from_scores(scores, library, k);

  HybridResult out;
  Evidence evidence;
  for (const RankedCase& rc : knn) {
    const std::size_t pos = *library.index_of(rc.id);
    const int level = adaptations.level(pos);
    evidence.emplace(rc.id, level);
    if (adaptations.adaptable(pos)) {
      out.ranked.push_back({rc.id, rc.similarity, Source::knn, level});
      ++out.adaptable_knn;
    }
  }
  if (out.adaptable_knn == k) return out;

  out.used_mrf = true;
  const auto found = mrf_candidates(index, evidence, spec);
  out.converged = found.converged;
  std::vector<std::pair<std::size_t, int>> pool;  // (library position, level)
  for (const Candidate& c : found.candidates) pool.emplace_back(*library.index_of(c.id), c.level);
  std::stable_sort(pool.begin(), pool.end(), [&](const auto& a, const auto& b) {
    return scores.similarity[a.first] > scores.similarity[b.first];
  });
  const std::size_t room = k - out.adaptable_knn;
  for (std::size_t i = 0; i < pool.size() && i < room; ++i) {
    const std::size_t pos = pool[i].first;
    out.ranked.push_back({library[pos].id, scores.similarity[pos], Source::mrf, pool[i].second});
  }
  return out;
}

inline HybridResult agr_retrieve(const Query& q, const CaseBase& library,
                                 const InferenceIndex& index, std::size_t k,
                                 const CondSpec& spec, QueryAdaptations& adaptations) {
  return agr_retrieve(score_query(q, library), library, index, k, spec, adaptations);
}

}  // namespace agr
