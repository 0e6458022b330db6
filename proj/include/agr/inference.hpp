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
#include <span>
#include <string_view>
#include <vector>

#include "agr/error.hpp"
#include "agr/mrf.hpp"

namespace agr {

enum class Engine { mean_field, loopy_bp, exact };

inline Engine parse_engine(std::string_view name) {
  if (name == "mean_field" || name == "mean-field") return Engine::mean_field;
  if (name == "loopy_bp" || name == "loopy-bp") return Engine::loopy_bp;
  if (name == "exact") return Engine::exact;
  throw ConfigError("unknown inference engine: " + std::string(name));
}

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::mean_field: return "mean_field";
    case Engine::loopy_bp: return "loopy_bp";
    case Engine::exact: return "exact";
  }
  return "?";
}

struct InferenceOptions {
  Engine engine = Engine::mean_field;
  double tolerance = 1e-6;
  int max_iterations = 200;
  double damping = 0.0;  // mean field only

  void validate() const {
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(damping >= 0.0 && damping < 1.0)) throw ConfigError("damping must lie in [0,1)");
  }
};

struct InferenceResult {
  Beliefs beliefs;
  bool converged = true;
  int iterations = 0;  // largest sweep count over components
};

namespace detail {

struct ComponentRun {
  bool converged = true;
  int iterations = 0;
};

inline void set_point_mass(std::span<double> row, int state) {
  std::fill(row.begin(), row.end(), 0.0);
  row[static_cast<std::size_t>(state)] = 1.0;
}

// Gauss-Seidel mean field over one component, nodes in ascending order.
// b_i(x) is proportional to exp(sum_j sum_y b_j(y) log Phi_ij(x, y)).
inline ComponentRun mean_field_component(const MetricMrf& mrf, std::span<const std::size_t> comp,
                                         const std::vector<int>& clamp,
                                         const InferenceOptions& opts, Beliefs& bel) {
  const std::size_t l = static_cast<std::size_t>(mrf.levels());
  bool any_free = false;
  for (std::size_t n : comp) {
    if (clamp[n] >= 0) {
      set_point_mass(bel.row(n), clamp[n]);
    } else {
      auto row = bel.row(n);
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(l));
      any_free = true;
    }
  }
  if (!any_free) return {true, 1};

  std::vector<double> logit(l), fresh(l);
  ComponentRun run{false, 0};
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    double delta = 0.0;
    for (std::size_t n : comp) {
      if (clamp[n] >= 0) continue;
      std::fill(logit.begin(), logit.end(), 0.0);
      for (const Neighbor& nb : mrf.neighbors(n)) {
        const auto other = bel.row(nb.node);
        // log Phi(x, y) = -s |x - y|
        for (std::size_t x = 0; x < l; ++x) {
          double expected = 0.0;
          for (std::size_t y = 0; y < l; ++y)
            expected -= other[y] * nb.weight * std::fabs(static_cast<double>(x) - static_cast<double>(y));
          logit[x] += expected;
        }
      }
      const double top = *std::max_element(logit.begin(), logit.end());
      double z = 0.0;
      for (std::size_t x = 0; x < l; ++x) z += fresh[x] = std::exp(logit[x] - top);
      auto row = bel.row(n);
      for (std::size_t x = 0; x < l; ++x) {
        const double updated = (1.0 - opts.damping) * (fresh[x] / z) + opts.damping * row[x];
        delta = std::max(delta, std::fabs(updated - row[x]));
        row[x] = updated;
      }
    }
    run.iterations = iter;
    if (delta < opts.tolerance) {
      run.converged = true;
      break;
    }
  }
  return run;
}

// Synchronous sum-product over one component. Clamped nodes send
// Phi(evidence, .) and keep point-mass beliefs.
inline ComponentRun loopy_bp_component(const MetricMrf& mrf, std::span<const std::size_t> comp,
                                       const std::vector<int>& clamp,
                                       const InferenceOptions& opts, Beliefs& bel) {
  const std::size_t l = static_cast<std::size_t>(mrf.levels());

  // Directed edges u->v, grouped by target v.
  struct Directed {
    std::size_t from, to, edge, reverse;
  };
  std::vector<Directed> msgs;
  std::vector<std::size_t> start;  // per local target, first incoming message
  std::unordered_map<std::size_t, std::size_t> local;
  for (std::size_t k = 0; k < comp.size(); ++k) local.emplace(comp[k], k);
  for (std::size_t v : comp) {
    start.push_back(msgs.size());
    for (const Neighbor& nb : mrf.neighbors(v)) msgs.push_back({nb.node, v, nb.edge, 0});
  }
  start.push_back(msgs.size());
  for (std::size_t d = 0; d < msgs.size(); ++d) {
    const std::size_t u = local.at(msgs[d].from);
    for (std::size_t r = start[u]; r < start[u + 1]; ++r)
      if (msgs[r].from == msgs[d].to) msgs[d].reverse = r;
  }

  std::vector<double> cur(msgs.size() * l, 1.0 / static_cast<double>(l));
  std::vector<double> next(cur.size());
  std::vector<double> product(l);
  ComponentRun run{true, 0};
  if (!msgs.empty()) {
    run.converged = false;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
      double delta = 0.0;
      for (std::size_t d = 0; d < msgs.size(); ++d) {
        const Directed& m = msgs[d];
        const std::size_t u = local.at(m.from);
        const int observed = clamp[m.from];
        for (std::size_t xu = 0; xu < l; ++xu) {
          if (observed >= 0) {
            product[xu] = static_cast<int>(xu) == observed ? 1.0 : 0.0;
            continue;
          }
          double p = 1.0;
          for (std::size_t r = start[u]; r < start[u + 1]; ++r)
            if (r != m.reverse) p *= cur[r * l + xu];
          product[xu] = p;
        }
        double z = 0.0;
        for (std::size_t xv = 0; xv < l; ++xv) {
          double s = 0.0;
          for (std::size_t xu = 0; xu < l; ++xu)
            s += product[xu] * mrf.potential_from(m.edge, m.from, xu, xv);
          next[d * l + xv] = s;
          z += s;
        }
        for (std::size_t xv = 0; xv < l; ++xv) {
          next[d * l + xv] /= z;
          delta = std::max(delta, std::fabs(next[d * l + xv] - cur[d * l + xv]));
        }
      }
      cur.swap(next);
      run.iterations = iter;
      if (delta < opts.tolerance) {
        run.converged = true;
        break;
      }
    }
  }

  for (std::size_t k = 0; k < comp.size(); ++k) {
    const std::size_t n = comp[k];
    auto row = bel.row(n);
    if (clamp[n] >= 0) {
      set_point_mass(row, clamp[n]);
      continue;
    }
    double z = 0.0;
    for (std::size_t x = 0; x < l; ++x) {
      double p = 1.0;
      for (std::size_t r = start[k]; r < start[k + 1]; ++r) p *= cur[r * l + x];
      row[x] = p;
      z += p;
    }
    for (double& v : row) v /= z;
  }
  return run;
}

inline ComponentRun run_component(const MetricMrf& mrf, std::span<const std::size_t> comp,
                                  const std::vector<int>& clamp, const InferenceOptions& opts,
                                  Beliefs& bel) {
  switch (opts.engine) {
    case Engine::mean_field: return mean_field_component(mrf, comp, clamp, opts, bel);
    case Engine::loopy_bp: return loopy_bp_component(mrf, comp, clamp, opts, bel);
    case Engine::exact: exact_component(mrf, comp, clamp, EnumerationLimits{}, bel); return {true, 1};
  }
  return {};
}

}  // namespace detail

// Runs the selected engine independently on every connected component.
inline InferenceResult infer(const MetricMrf& mrf, const Evidence& evidence,
                             const InferenceOptions& opts = {}) {
  opts.validate();
  const auto clamp = clamp_vector(mrf, evidence);
  InferenceResult result{Beliefs(mrf.size(), mrf.levels()), true, 0};
  for (const auto& comp : connected_components(mrf)) {
    const auto run = detail::run_component(mrf, comp, clamp, opts, result.beliefs);
    result.converged = result.converged && run.converged;
    result.iterations = std::max(result.iterations, run.iterations);
  }
  return result;
}

inline InferenceResult mean_field(const MetricMrf& mrf, const Evidence& evidence,
                                  double tolerance = 1e-6, int max_iterations = 200,
                                  double damping = 0.0) {
  return infer(mrf, evidence, {Engine::mean_field, tolerance, max_iterations, damping});
}

inline InferenceResult loopy_bp(const MetricMrf& mrf, const Evidence& evidence,
                                double tolerance = 1e-6, int max_iterations = 200) {
  return infer(mrf, evidence, {Engine::loopy_bp, tolerance, max_iterations, 0.0});
}

// Precomputed component structure plus evidence-free beliefs, so a query
// only re-runs the components its evidence touches. Results are
// identical to infer() on the whole graph.
class InferenceIndex {
 public:
  InferenceIndex(const MetricMrf& mrf, InferenceOptions opts)
      : mrf_(&mrf), opts_(opts), components_(connected_components(mrf)),
        component_of_(mrf.size()), prior_(mrf.size(), mrf.levels()) {
    opts_.validate();
    const std::vector<int> none(mrf.size(), -1);
    for (std::size_t c = 0; c < components_.size(); ++c) {
      for (std::size_t n : components_[c]) component_of_[n] = c;
      const auto run = detail::run_component(mrf, components_[c], none, opts_, prior_);
      prior_runs_.push_back(run);
    }
  }

  const MetricMrf& mrf() const { return *mrf_; }
  const InferenceOptions& options() const { return opts_; }
  const std::vector<std::vector<std::size_t>>& components() const { return components_; }
  std::size_t component_of(std::size_t node) const { return component_of_[node]; }

  InferenceResult run(const Evidence& evidence) const {
    const auto clamp = clamp_vector(*mrf_, evidence);
    std::vector<bool> touched(components_.size(), false);
    for (std::size_t n = 0; n < clamp.size(); ++n)
      if (clamp[n] >= 0) touched[component_of_[n]] = true;
    InferenceResult result{prior_, true, 0};
    for (std::size_t c = 0; c < components_.size(); ++c) {
      const auto run = touched[c]
                           ? detail::run_component(*mrf_, components_[c], clamp, opts_, result.beliefs)
                           : prior_runs_[c];
      result.converged = result.converged && run.converged;
      result.iterations = std::max(result.iterations, run.iterations);
    }
    return result;
  }

 private:
  const MetricMrf* mrf_;
  InferenceOptions opts_;
  std::vector<std::vector<std::size_t>> components_;
  std::vector<std::size_t> component_of_;
  Beliefs prior_;
  std::vector<detail::ComponentRun> prior_runs_;
};

}  // namespace agr
