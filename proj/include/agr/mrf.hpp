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
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "agr/case_base.hpp"
#include "agr/csv.hpp"
#include "agr/error.hpp"
#include "agr/model.hpp"

namespace agr {

struct MrfEdge {
  std::size_t a = 0;  // node index, a < b
  std::size_t b = 0;
  double weight = 0.0;

  bool operator==(const MrfEdge&) const = default;
};

struct Neighbor {
  std::size_t node;
  std::size_t edge;
  double weight;
};

// Pairwise metric MRF. Node i stands for the case with id node_id(i);
// nodes are ordered by ascending case id. States are 1..levels() at the
// API, 0-based inside the tables.
class MetricMrf {
 public:
  MetricMrf(std::vector<CaseId> ids, int levels, double threshold, std::vector<MrfEdge> edges)
      : ids_(std::move(ids)), levels_(levels), threshold_(threshold), edges_(std::move(edges)) {
    if (levels_ < 2) throw ConfigError("an MRF needs at least two states");
    if (!std::is_sorted(ids_.begin(), ids_.end()) ||
        std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
      throw ConfigError("node ids must be strictly ascending");
    for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
    for (auto& e : edges_) {
      if (e.a > e.b) std::swap(e.a, e.b);
      if (e.a == e.b) throw ConfigError("self-edge on node " + std::to_string(ids_.at(e.a)));
      if (e.b >= ids_.size()) throw ConfigError("edge endpoint out of range");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw ConfigError("edge weight must be positive");
    }
    std::sort(edges_.begin(), edges_.end(), [](const MrfEdge& x, const MrfEdge& y) {
      return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
    for (std::size_t e = 1; e < edges_.size(); ++e)
      if (edges_[e].a == edges_[e - 1].a && edges_[e].b == edges_[e - 1].b)
        throw ConfigError("duplicate edge");

    const std::size_t l = static_cast<std::size_t>(levels_);
    potentials_.resize(edges_.size() * l * l);
    for (std::size_t e = 0; e < edges_.size(); ++e)
      for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j)
          potentials_[(e * l + i) * l + j] =
              std::exp(-edges_[e].weight * std::fabs(static_cast<double>(i) - static_cast<double>(j)));

    std::vector<std::size_t> degree(ids_.size(), 0);
    for (const auto& e : edges_) {
      ++degree[e.a];
      ++degree[e.b];
    }
    offsets_.assign(ids_.size() + 1, 0);
    for (std::size_t i = 0; i < ids_.size(); ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      adjacency_[fill[edges_[e].a]++] = {edges_[e].b, e, edges_[e].weight};
      adjacency_[fill[edges_[e].b]++] = {edges_[e].a, e, edges_[e].weight};
    }
    for (std::size_t i = 0; i < ids_.size(); ++i)
      std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1],
                [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }

  std::size_t size() const { return ids_.size(); }
  int levels() const { return levels_; }
  double threshold() const { return threshold_; }
  const std::vector<MrfEdge>& edges() const { return edges_; }
  const std::vector<CaseId>& node_ids() const { return ids_; }
  CaseId node_id(std::size_t i) const { return ids_[i]; }

  std::optional<std::size_t> index_of(CaseId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const Neighbor> neighbors(std::size_t i) const {
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  // Phi_e(x_a, x_b) with 0-based states, oriented as stored (a < b).
  double potential(std::size_t edge, std::size_t xa, std::size_t xb) const {
    const std::size_t l = static_cast<std::size_t>(levels_);
    return potentials_[(edge * l + xa) * l + xb];
  }

  // Edge potential as seen from `from`: Phi(x_from, x_to).
  double potential_from(std::size_t edge, std::size_t from, std::size_t x_from,
                        std::size_t x_to) const {
    return edges_[edge].a == from ? potential(edge, x_from, x_to) : potential(edge, x_to, x_from);
  }

 private:
  std::vector<CaseId> ids_;
  int levels_;
  double threshold_;
  std::vector<MrfEdge> edges_;
  std::vector<double> potentials_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::unordered_map<CaseId, std::size_t> index_;
};

// One node per case; an edge wherever the solution similarity exceeds
// `threshold`, weighted by that similarity. With threshold >= 1 the
// graph is edgeless.
inline MetricMrf build_mrf(const CaseBase& cb, double threshold, int levels) {
  if (!(threshold > 0.0)) throw ConfigError("solution threshold must be > 0");
  const CaseBaseStats& stats = cb.stats();
  std::vector<CaseId> ids;
  ids.reserve(cb.size());
  for (const Case& c : cb.cases()) ids.push_back(c.id);
  std::vector<MrfEdge> edges;
  for (std::size_t n = 0; n < cb.size(); ++n)
    for (std::size_t m = n + 1; m < cb.size(); ++m) {
      const double s = similarity(solution_distance(cb.schema(), stats, cb[n], cb[m]));
      if (s > threshold) edges.push_back({n, m, s});
    }
  return MetricMrf(std::move(ids), levels, threshold, std::move(edges));
}

// Observed states (1-based) keyed by case id.
using Evidence = std::map<CaseId, int>;

// Per-node clamp: -1 for free nodes, otherwise the 0-based state.
inline std::vector<int> clamp_vector(const MetricMrf& mrf, const Evidence& evidence) {
  std::vector<int> clamp(mrf.size(), -1);
  for (const auto& [id, state] : evidence) {
    auto i = mrf.index_of(id);
    if (!i) throw ConfigError("evidence on unknown node " + std::to_string(id));
    if (state < 1 || state > mrf.levels())
      throw ConfigError("evidence state " + std::to_string(state) + " out of range");
    clamp[*i] = state - 1;
  }
  return clamp;
}

class Beliefs {
 public:
  Beliefs() = default;
  Beliefs(std::size_t nodes, int levels)
      : levels_(static_cast<std::size_t>(levels)), values_(nodes * levels_, 0.0) {}

  std::size_t size() const { return levels_ == 0 ? 0 : values_.size() / levels_; }
  int levels() const { return static_cast<int>(levels_); }

  std::span<double> row(std::size_t node) { return {values_.data() + node * levels_, levels_}; }
  std::span<const double> row(std::size_t node) const {
    return {values_.data() + node * levels_, levels_};
  }
  // 1-based state, matching evidence and adaptation levels.
  double at(std::size_t node, int state) const { return values_[node * levels_ + state - 1]; }

  const std::vector<double>& raw() const { return values_; }
  bool operator==(const Beliefs&) const = default;

 private:
  std::size_t levels_ = 0;
  std::vector<double> values_;
};

// Nodes grouped by edge connectivity. Each component lists its nodes in
// ascending order; components are ordered by their smallest node.
inline std::vector<std::vector<std::size_t>> connected_components(const MetricMrf& mrf) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(mrf.size(), false);
  for (std::size_t start = 0; start < mrf.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> comp{start};
    seen[start] = true;
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (const Neighbor& nb : mrf.neighbors(comp[head]))
        if (!seen[nb.node]) {
          seen[nb.node] = true;
          comp.push_back(nb.node);
        }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// Product of all edge potentials for a full assignment of 1-based states.
inline double joint_unnormalized(const MetricMrf& mrf, std::span<const int> assignment) {
  if (assignment.size() != mrf.size()) throw ConfigError("assignment size mismatch");
  double p = 1.0;
  for (std::size_t e = 0; e < mrf.edges().size(); ++e) {
    const MrfEdge& edge = mrf.edges()[e];
    p *= mrf.potential(e, static_cast<std::size_t>(assignment[edge.a] - 1),
                       static_cast<std::size_t>(assignment[edge.b] - 1));
  }
  return p;
}

struct EnumerationLimits {
  std::size_t max_component_nodes = 16;
  std::uint64_t max_assignments = std::uint64_t{1} << 26;
};

namespace detail {

// Enumerates the free nodes of one component and writes its exact
// marginals into `bel`.
inline void exact_component(const MetricMrf& mrf, std::span<const std::size_t> comp,
                            const std::vector<int>& clamp, const EnumerationLimits& limits,
                            Beliefs& bel) {
  const std::size_t l = static_cast<std::size_t>(mrf.levels());
  if (comp.size() > limits.max_component_nodes)
    throw ComputeError("component of " + std::to_string(comp.size()) +
                       " nodes too large for enumeration");
  std::vector<std::size_t> free;
  for (std::size_t n : comp)
    if (clamp[n] < 0) free.push_back(n);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < free.size(); ++i) {
    total *= l;
    if (total > limits.max_assignments) throw ComputeError("state space too large for enumeration");
  }
  std::vector<std::size_t> edges;
  for (std::size_t n : comp)
    for (const Neighbor& nb : mrf.neighbors(n))
      if (n < nb.node) edges.push_back(nb.edge);

  std::vector<std::size_t> state(mrf.size(), 0);
  for (std::size_t n : comp)
    if (clamp[n] >= 0) state[n] = static_cast<std::size_t>(clamp[n]);
  std::vector<double> acc(comp.size() * l, 0.0);
  double z = 0.0;
  std::vector<std::size_t> digits(free.size(), 0);
  for (std::uint64_t it = 0; it < total; ++it) {
    for (std::size_t k = 0; k < free.size(); ++k) state[free[k]] = digits[k];
    double w = 1.0;
    for (std::size_t e : edges) w *= mrf.potential(e, state[mrf.edges()[e].a], state[mrf.edges()[e].b]);
    z += w;
    for (std::size_t k = 0; k < comp.size(); ++k) acc[k * l + state[comp[k]]] += w;
    for (std::size_t k = 0; k < free.size(); ++k) {
      if (++digits[k] < l) break;
      digits[k] = 0;
    }
  }
  for (std::size_t k = 0; k < comp.size(); ++k) {
    auto row = bel.row(comp[k]);
    for (std::size_t x = 0; x < l; ++x) row[x] = acc[k * l + x] / z;
  }
}

}  // namespace detail

// Exact marginals by enumerating every evidence-consistent assignment,
// one connected component at a time. Only the enumeration oracle ever
// forms the partition sum.
inline Beliefs exact_marginals(const MetricMrf& mrf, const Evidence& evidence,
                               EnumerationLimits limits = {}) {
  const auto clamp = clamp_vector(mrf, evidence);
  Beliefs bel(mrf.size(), mrf.levels());
  for (const auto& comp : connected_components(mrf))
    detail::exact_component(mrf, comp, clamp, limits, bel);
  return bel;
}

// The MRF restricted to `nodes` (ascending), keeping ids, weights and
// neighbor order.
inline MetricMrf induced_subgraph(const MetricMrf& mrf, std::span<const std::size_t> nodes) {
  std::vector<CaseId> ids;
  std::unordered_map<std::size_t, std::size_t> local;
  for (std::size_t n : nodes) {
    local.emplace(n, ids.size());
    ids.push_back(mrf.node_id(n));
  }
  std::vector<MrfEdge> edges;
  for (const MrfEdge& e : mrf.edges()) {
    auto a = local.find(e.a);
    auto b = local.find(e.b);
    if (a != local.end() && b != local.end()) edges.push_back({a->second, b->second, e.weight});
  }
  return MetricMrf(std::move(ids), mrf.levels(), mrf.threshold(), std::move(edges));
}

// Text edge list: a header line carrying the state count and threshold,
// then one `n m s` line per edge (case ids, similarity).
inline void write_edge_list(std::ostream& out, const MetricMrf& mrf) {
  out << "# metric-mrf l=" << mrf.levels() << " st=" << csv::format_number(mrf.threshold())
      << " nodes=" << mrf.size() << " edges=" << mrf.edges().size() << '\n';
  for (const MrfEdge& e : mrf.edges())
    out << mrf.node_id(e.a) << ' ' << mrf.node_id(e.b) << ' ' << csv::format_number(e.weight)
        << '\n';
}

struct EdgeList {
  int levels = 0;
  double threshold = 0.0;
  std::size_t nodes = 0;
  std::vector<std::tuple<CaseId, CaseId, double>> edges;
};

inline EdgeList read_edge_list(std::istream& in) {
  EdgeList out;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# metric-mrf", 0) != 0)
    throw DataError("edge list: missing header");
  std::istringstream header(line.substr(12));
  std::string field;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw DataError("edge list: malformed header field " + field);
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "l") out.levels = std::stoi(value);
    else if (key == "st") out.threshold = std::stod(value);
    else if (key == "nodes") out.nodes = std::stoul(value);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    CaseId n, m;
    std::string s;
    if (!(row >> n >> m >> s)) throw DataError("edge list: malformed line '" + line + "'");
    auto w = csv::parse_number(s);
    if (!w) throw DataError("edge list: malformed weight '" + s + "'");
    out.edges.emplace_back(n, m, *w);
  }
  return out;
}

}  // namespace agr
