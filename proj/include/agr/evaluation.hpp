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
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "agr/adaptation.hpp"
#include "agr/case_base.hpp"
#include "agr/csv.hpp"
#include "agr/error.hpp"
#include "agr/inference.hpp"
#include "agr/metrics.hpp"
#include "agr/mrf.hpp"
#include "agr/random.hpp"
#include "agr/retrieval.hpp"
#include "agr/synthetic.hpp"

namespace agr {

// Library cases with structural similarity >= thr whose adaptation to
// the query succeeds. Every case is adapted, independently of any
// retrieval strategy.
inline std::unordered_set<CaseId> positive_set(const QueryScores& scores, const CaseBase& library,
                                               double thr, QueryAdaptations& adaptations) {
  if (!(thr > 0.0)) throw ConfigError("positive_set: thr must be > 0");
  std::unordered_set<CaseId> out;
  for (std::size_t i = 0; i < library.size(); ++i)
    if (scores.similarity[i] >= thr && level_of(adaptations.outcome(i), LevelMapping::binary()) == 1)
      out.insert(library[i].id);
  return out;
}

inline std::unordered_set<CaseId> positive_set(const Query& q, const CaseBase& library, double thr,
                                               QueryAdaptations& adaptations) {
  return positive_set(score_query(q, library), library, thr, adaptations);
}

enum class Strategy { knn, mrf };

inline std::string_view to_string(Strategy s) { return s == Strategy::knn ? "kNN" : "MRF"; }

inline std::vector<std::size_t> default_k_grid() {
  std::vector<std::size_t> ks;
  for (std::size_t k = 1; k <= 15; ++k) ks.push_back(k);
  for (std::size_t k = 20; k <= 100; k += 10) ks.push_back(k);
  return ks;
}

struct SweepConfig {
  std::vector<double> alphas{0.75, 0.95, 1.0, 1.25, 1.5};
  std::vector<std::size_t> ks = default_k_grid();
  std::size_t folds = 10;
  double st = 0.9;
  double pt = 0.9;
  std::uint64_t seed = 1;
  MissingnessProfile missingness = MissingnessProfile::standard();
  double acceptance = 0.8;
  LevelMapping levels = LevelMapping::binary();
  InferenceOptions inference;

  void validate() const {
    if (folds < 2) throw ConfigError("folds must be >= 2");
    if (alphas.empty() || ks.empty()) throw ConfigError("alphas and ks must be non-empty");
    for (double a : alphas)
      if (!(a > 0.0)) throw ConfigError("alphas must be > 0");
    for (std::size_t k : ks)
      if (k < 1) throw ConfigError("ks must be >= 1");
    if (!(st > 0.0)) throw ConfigError("st must be > 0");
    if (!(pt > 0.0 && pt < 1.0)) throw ConfigError("pt must lie in (0,1)");
    if (!(acceptance >= 0.0 && acceptance <= 1.0)) throw ConfigError("acceptance outside [0,1]");
    missingness.validate();
    inference.validate();
  }
};

struct FoldRow {
  Strategy strategy;
  double alpha;
  std::size_t k;
  std::size_t fold;
  double accuracy, precision, recall, f1;
  double mean_positives;
  std::size_t library_size;
  std::size_t queries;
};

struct MeanRow {
  Strategy strategy;
  double alpha;
  std::size_t k;
  double accuracy, precision, recall, f1;
  double mean_positives;
};

struct CurveResult {
  Strategy strategy;
  double alpha;
  std::vector<PrPoint> curve;
  double auc;
  bool pessimistic;  // closed with the synthetic (1, P/N) point
  double positives;  // mean P
  double total;      // mean N
};

struct FoldSummary {
  std::size_t fold;
  std::size_t library_size;
  std::size_t queries;
  double mean_similarity;
  std::size_t mrf_edges;
  std::size_t mrf_components;
  std::size_t nonconverged;  // hybrid retrievals whose inference hit max_iterations
};

struct SweepResult {
  std::vector<FoldRow> rows;  // ordered by strategy, alpha, k, fold
  std::vector<MeanRow> means;
  std::vector<CurveResult> curves;
  std::vector<FoldSummary> folds;
};

struct FoldPlan {
  std::vector<std::size_t> train;  // ascending positions
  std::vector<std::size_t> test;   // ascending positions
};

// Seeded shuffle, then `folds` contiguous slices whose sizes differ by at
// most one.
inline std::vector<FoldPlan> plan_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) throw ConfigError("fold count must lie in [2, n]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_keys(seed, 0x666f6c64ULL));
  rng.shuffle(order);
  std::vector<FoldPlan> plans(folds);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t f = 0; f < folds; ++f)
    for (std::size_t r = f * n / folds; r < (f + 1) * n / folds; ++r) fold_of[order[r]] = f;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t f = 0; f < folds; ++f) (fold_of[p] == f ? plans[f].test : plans[f].train).push_back(p);
  return plans;
}

namespace detail {

struct CellSums {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, positives = 0;
};

struct FoldOutput {
  FoldSummary summary;
  // [strategy][alpha][k]
  std::vector<std::vector<std::vector<CellSums>>> sums;
};

inline FoldOutput run_fold(const CaseBase& cb, const FoldPlan& plan, std::size_t fold,
                           const SweepConfig& cfg) {
  const CaseBase library = with_stats(cb.subset(plan.train));
  const CaseBaseStats& stats = library.stats();
  const MetricMrf mrf = build_mrf(library, cfg.st, cfg.levels.num_levels());
  const InferenceIndex index(mrf, cfg.inference);
  const AdaptationLibrary rules(library);
  const auto acceptance = AcceptanceModel::bernoulli(cfg.acceptance, mix_keys(cfg.seed, 3));
  const auto spec = CondSpec::threshold_collapse(1, cfg.pt);
  const std::uint64_t missing_seed = mix_keys(cfg.seed, 2);
  const auto total = static_cast<std::int64_t>(library.size());

  FoldOutput out;
  out.summary = {fold, library.size(), plan.test.size(), stats.mean_similarity, mrf.edges().size(),
                 index.components().size(), 0};
  out.sums.assign(2, std::vector<std::vector<CellSums>>(cfg.alphas.size(),
                                                        std::vector<CellSums>(cfg.ks.size())));

  for (std::size_t pos : plan.test) {
    Query q = inject_missing(query_from_case(cb[pos], cb.schema(), stats.mean_price),
                             cfg.missingness, missing_seed, cb.schema());
    const QueryScores scores = score_query(q, library);
    QueryAdaptations adaptations(library, rules, q, acceptance, cfg.levels);
    std::vector<std::unordered_set<CaseId>> positives;
    for (double alpha : cfg.alphas)
      positives.push_back(positive_set(scores, library, alpha * stats.mean_similarity, adaptations));

    for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
      const std::size_t k = cfg.ks[ki];
      std::vector<CaseId> knn_ids;
      for (std::size_t r = 0; r < k; ++r) knn_ids.push_back(library[scores.order[r]].id);
      const HybridResult hybrid = agr_retrieve(scores, library, index, k, spec, adaptations);
      if (!hybrid.converged) ++out.summary.nonconverged;
      std::vector<CaseId> hybrid_ids;
      for (const RankedCase& rc : hybrid.ranked) hybrid_ids.push_back(rc.id);

      for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
        const auto add = [&](Strategy s, const std::vector<CaseId>& ids) {
          const Scores sc = score(ids, positives[ai], total);
          CellSums& cell = out.sums[static_cast<std::size_t>(s)][ai][ki];
          cell.accuracy += sc.accuracy;
          cell.precision += sc.precision;
          cell.recall += sc.recall;
          cell.f1 += sc.f1;
          cell.positives += static_cast<double>(sc.counts.positives);
        };
        add(Strategy::knn, knn_ids);
        add(Strategy::mrf, hybrid_ids);
      }
    }
  }
  return out;
}

}  // namespace detail

// k-fold cross validation of plain kNN against the kNN+MRF hybrid.
// Statistics, budget, mu_c and the MRF are rebuilt on each training
// fold; held-out cases become queries. Folds may run on `jobs` threads;
// the reduction runs in fold order, so the output does not depend on
// scheduling.
inline SweepResult cross_validate(const CaseBase& cb, const SweepConfig& cfg,
                                  std::size_t jobs = 1) {
  cfg.validate();
  const auto plans = plan_folds(cb.size(), cfg.folds, mix_keys(cfg.seed, 1));
  const std::size_t max_k = *std::max_element(cfg.ks.begin(), cfg.ks.end());
  for (const FoldPlan& p : plans)
    if (p.train.size() < std::max<std::size_t>(max_k, 2) || p.test.empty())
      throw ConfigError("fold too small: " + std::to_string(p.train.size()) +
                        " training cases for k up to " + std::to_string(max_k));

  std::vector<detail::FoldOutput> outputs(plans.size());
  std::vector<std::exception_ptr> errors(plans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < plans.size(); f = next++) {
      try {
        outputs[f] = detail::run_fold(cb, plans[f], f, cfg);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, plans.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult result;
  for (const auto& o : outputs) result.folds.push_back(o.summary);
  const double nfolds = static_cast<double>(plans.size());
  double mean_n = 0.0;
  for (const auto& o : outputs) mean_n += static_cast<double>(o.summary.library_size) / nfolds;

  for (Strategy s : {Strategy::knn, Strategy::mrf}) {
    const auto si = static_cast<std::size_t>(s);
    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
      std::vector<PrPoint> points;
      double mean_p = 0.0;
      for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
        MeanRow mean{s, cfg.alphas[ai], cfg.ks[ki], 0, 0, 0, 0, 0};
        for (std::size_t f = 0; f < outputs.size(); ++f) {
          const auto& cell = outputs[f].sums[si][ai][ki];
          const double q = static_cast<double>(outputs[f].summary.queries);
          FoldRow row{s,
                      cfg.alphas[ai],
                      cfg.ks[ki],
                      f,
                      cell.accuracy / q,
                      cell.precision / q,
                      cell.recall / q,
                      cell.f1 / q,
                      cell.positives / q,
                      outputs[f].summary.library_size,
                      outputs[f].summary.queries};
          mean.accuracy += row.accuracy / nfolds;
          mean.precision += row.precision / nfolds;
          mean.recall += row.recall / nfolds;
          mean.f1 += row.f1 / nfolds;
          mean.mean_positives += row.mean_positives / nfolds;
          result.rows.push_back(row);
        }
        mean_p = mean.mean_positives;
        points.push_back({mean.recall, mean.precision, cfg.ks[ki]});
        result.means.push_back(mean);
      }
      auto curve = pr_curve(points, mean_p, mean_n);
      const bool pessimistic = has_synthetic_endpoint(curve);
      const double area = auc(curve);
      result.curves.push_back({s, cfg.alphas[ai], std::move(curve), area, pessimistic, mean_p, mean_n});
    }
  }
  return result;
}

inline std::string alpha_tag(double alpha) { return csv::format_number(alpha); }

// Writes results.csv, means.csv and one pr_<strategy>_alpha<a>.csv per
// curve. `header` is emitted verbatim as a leading comment line.
inline std::vector<std::filesystem::path> write_sweep(const std::filesystem::path& dir,
                                                      const SweepResult& r,
                                                      const std::string& header) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name) {
    written.push_back(dir / name);
    std::ofstream out(written.back(), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + written.back().string());
    out << "# " << header << '\n';
    return out;
  };
  using csv::format_number;
  {
    auto out = open("results.csv");
    out << "strategy,alpha,k,fold,accuracy,precision,recall,f1\n";
    for (const auto& row : r.rows)
      out << to_string(row.strategy) << ',' << format_number(row.alpha) << ',' << row.k << ','
          << row.fold << ',' << format_number(row.accuracy) << ',' << format_number(row.precision)
          << ',' << format_number(row.recall) << ',' << format_number(row.f1) << '\n';
  }
  {
    auto out = open("means.csv");
    out << "strategy,alpha,k,accuracy,precision,recall,f1,mean_positives\n";
    for (const auto& m : r.means)
      out << to_string(m.strategy) << ',' << format_number(m.alpha) << ',' << m.k << ','
          << format_number(m.accuracy) << ',' << format_number(m.precision) << ','
          << format_number(m.recall) << ',' << format_number(m.f1) << ','
          << format_number(m.mean_positives) << '\n';
  }
  for (const auto& c : r.curves) {
    auto out = open("pr_" + std::string(to_string(c.strategy)) + "_alpha" + alpha_tag(c.alpha) + ".csv");
    out << "recall,precision\n";
    for (const auto& p : c.curve) out << format_number(p.recall) << ',' << format_number(p.precision) << '\n';
    out << "AUC," << format_number(c.auc) << '\n';
  }
  return written;
}

}  // namespace agr
