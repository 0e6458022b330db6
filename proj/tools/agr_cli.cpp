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

// Command-line driver: dataset generation/validation, single-query
// retrieval, cross-validated sweeps and MRF inspection.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "agr/agr.hpp"
#include "agr/config.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

struct DatasetArgs {
  std::size_t n = 1500;
  std::uint64_t seed = 1;
  std::string out;
  std::string in;
};

struct CommonArgs {
  std::string cases;
  std::string schema;
};

struct RetrieveArgs {
  std::string query;
  agr::CaseId query_case = -1;
  agr::CaseId query_id = -1;
  double budget = 0.0;
  std::size_t k = 5;
  double st = 0.9;
  double pt = 0.9;
  std::string engine = "mean_field";
  std::string levels = "binary";
  double accept = 0.8;
  std::uint64_t seed = 1;
  bool knn_only = false;
  std::string out;
};

struct EvalArgs {
  std::string config;
  std::string out;
  std::size_t jobs = 1;
};

struct DumpArgs {
  double st = 0.9;
  int levels = 2;
  std::string out;
};

agr::FeatureSchema load_schema(const std::string& path) {
  if (path.empty()) return agr::FeatureSchema::travel();
  return agr::schema_from_json(agr::read_json_file(path));
}

agr::CaseBase load_cases(const CommonArgs& common) {
  const auto schema = load_schema(common.schema);
  return agr::load_csv(common.cases, schema);
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return agr::config_hash(agr::Json(buf.str()));
}

int cmd_dataset_gen(const DatasetArgs& a, const CommonArgs& common) {
  const auto cb = agr::generate_synthetic(a.n, a.seed, load_schema(common.schema));
  agr::write_csv(a.out, cb);
  std::cerr << "wrote " << cb.size() << " cases to " << a.out << '\n';
  return kOk;
}

int cmd_dataset_validate(const DatasetArgs& a, const CommonArgs& common) {
  std::ifstream in(a.in);
  if (!in) throw std::runtime_error("cannot open " + a.in);
  const auto report = agr::read_csv(in, load_schema(common.schema));
  if (!report.errors.empty()) {
    for (const auto& e : report.errors) std::cerr << a.in << ": " << e << '\n';
    return kData;
  }
  const agr::HotelIndex hotels(*report.cases);
  std::size_t thin = 0;
  for (const auto& [pocket, list] : hotels.pockets())
    if (hotels.distinct_in(pocket.first, pocket.second) < 2) ++thin;
  std::cout << a.in << ": " << report.cases->size() << " cases OK";
  if (thin > 0) std::cout << " (" << thin << " hotel pockets with a single hotel)";
  std::cout << '\n';
  return kOk;
}

agr::Query parse_query(const std::string& spec, const agr::FeatureSchema& schema) {
  agr::Query q;
  q.values.assign(schema.size(), agr::Missing{});
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw agr::ConfigError("query item '" + item + "' is not name=value");
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    const std::size_t i = schema.index_of(name);
    if (value.empty()) continue;
    if (schema[i].kind.is_label()) {
      q.values[i] = value;
    } else if (auto x = agr::csv::parse_number(value)) {
      q.values[i] = *x;
    } else {
      throw agr::ConfigError("query value for " + name + " is not a number: " + value);
    }
  }
  return q;
}

int cmd_retrieve(const RetrieveArgs& a, const CommonArgs& common) {
  const auto cond = agr::CondSpec::threshold_collapse(1, a.pt);
  const auto mapping = a.levels == "four" ? agr::LevelMapping::four_level()
                                          : agr::LevelMapping::binary();
  agr::InferenceOptions opts;
  opts.engine = agr::parse_engine(a.engine);
  const agr::CaseBase library = agr::with_stats(load_cases(common));
  if (a.k < 1 || a.k > library.size())
    throw agr::ConfigError("k must lie in [1, " + std::to_string(library.size()) + "]");

  agr::Query q;
  if (a.query_case >= 0) {
    const auto pos = library.index_of(a.query_case);
    if (!pos) throw agr::ConfigError("no case with id " + std::to_string(a.query_case));
    q = agr::query_from_case(library[*pos], library.schema(), 0.0);
  }
  if (!a.query.empty()) {
    const auto extra = parse_query(a.query, library.schema());
    if (a.query_case < 0) q = extra;
    else
      for (std::size_t i = 0; i < extra.values.size(); ++i)
        if (!agr::is_missing(extra.values[i])) q.values[i] = extra.values[i];
  }
  if (a.query_case < 0 && a.query.empty()) throw agr::ConfigError("give --query or --query-case");
  if (a.query_id >= 0) q.id = a.query_id;
  else if (a.query_case < 0) q.id = 0;
  q.budget = a.budget > 0.0 ? a.budget : library.stats().mean_price;
  agr::validate_query(library.schema(), q);

  const agr::AdaptationLibrary rules(library);
  agr::QueryAdaptations adaptations(library, rules, q, agr::AcceptanceModel::bernoulli(a.accept, a.seed),
                                    mapping);
  const auto scores = agr::score_query(q, library);
  std::vector<agr::RankedCase> ranked;
  if (a.knn_only) {
    ranked = agr::knn_from_scores(scores, library, a.k);
    for (auto& rc : ranked) rc.level = adaptations.level(*library.index_of(rc.id));
  } else {
    const auto mrf = agr::build_mrf(library, a.st, mapping.num_levels());
    if (a.st >= 1.0) std::cerr << "warning: st >= 1 gives an edgeless MRF\n";
    const agr::InferenceIndex index(mrf, opts);
    const auto hybrid = agr::agr_retrieve(scores, library, index, a.k, cond, adaptations);
    ranked = hybrid.ranked;
    std::cerr << "adaptable kNN cases: " << hybrid.adaptable_knn << " of " << a.k
              << (hybrid.used_mrf ? ", MRF stage used" : "")
              << (hybrid.converged ? "" : ", inference did not converge") << '\n';
    if (ranked.size() < a.k)
      std::cerr << "note: only " << ranked.size() << " cases returned\n";
  }

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "query_id,rank,case_id,similarity,source,level\n";
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& rc = ranked[r];
    out << q.id << ',' << r + 1 << ',' << rc.id << ',' << agr::csv::format_number(rc.similarity)
        << ',' << agr::to_string(rc.source) << ',' << (rc.level ? std::to_string(*rc.level) : "")
        << '\n';
  }
  return kOk;
}

int cmd_eval(const EvalArgs& a, const CommonArgs& common) {
  const auto cfg_json = agr::read_json_file(a.config);
  const auto cfg = agr::sweep_from_json(cfg_json);
  const auto cb = load_cases(common);
  agr::Json normalized = agr::sweep_to_json(cfg);
  normalized["schema"] = agr::schema_to_json(cb.schema());
  const std::string hash = agr::config_hash(normalized);
  const std::string header = "config_hash=" + hash + " seed=" + std::to_string(cfg.seed) +
                             " cases_hash=" + file_hash(common.cases) +
                             " engine=" + std::string(agr::to_string(cfg.inference.engine));
  std::cout << header << '\n';

  const auto result = agr::cross_validate(cb, cfg, a.jobs);
  for (const auto& f : result.folds)
    std::cerr << "fold " << f.fold << ": library " << f.library_size << ", queries " << f.queries
              << ", mu_c " << f.mean_similarity << ", MRF edges " << f.mrf_edges << " in "
              << f.mrf_components << " components"
              << (f.nonconverged ? ", non-converged runs " + std::to_string(f.nonconverged) : "")
              << '\n';
  for (const auto& path : agr::write_sweep(a.out, result, header)) std::cout << path.string() << '\n';
  for (const auto& c : result.curves)
    std::cout << agr::to_string(c.strategy) << " alpha=" << c.alpha << " AUC=" << c.auc
              << (c.pessimistic ? " (pessimistic)" : "") << '\n';
  return kOk;
}

int cmd_mrf_dump(const DumpArgs& a, const CommonArgs& common) {
  const auto library = agr::with_stats(load_cases(common));
  if (a.st >= 1.0) std::cerr << "warning: st >= 1 gives an edgeless MRF\n";
  const auto mrf = agr::build_mrf(library, a.st, a.levels);
  if (a.out.empty()) {
    agr::write_edge_list(std::cout, mrf);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    agr::write_edge_list(out, mrf);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptation-guided case retrieval with metric MRF inference"};
  app.require_subcommand(1);
  CommonArgs common;
  DatasetArgs ds;
  RetrieveArgs ret;
  EvalArgs ev;
  DumpArgs dump;

  auto* dataset = app.add_subcommand("dataset", "Generate or validate case-base CSV files");
  dataset->require_subcommand(1);
  auto* gen = dataset->add_subcommand("gen", "Write a seeded synthetic Travel case base");
  gen->add_option("--n", ds.n, "Number of cases (>= 50)")->default_val(1500);
  gen->add_option("--seed", ds.seed, "Generator seed")->default_val(1);
  gen->add_option("--out,-o", ds.out, "Output CSV path")->required();
  gen->add_option("--schema", common.schema, "Schema JSON (default: Travel)");
  auto* validate = dataset->add_subcommand("validate", "Check a CSV against the schema");
  validate->add_option("--in,-i", ds.in, "Input CSV path")->required()->check(CLI::ExistingFile);
  validate->add_option("--schema", common.schema, "Schema JSON (default: Travel)");

  auto* retrieve = app.add_subcommand("retrieve", "Retrieve cases for one query");
  retrieve->add_option("--cases", common.cases, "Case base CSV")->required()->check(CLI::ExistingFile);
  retrieve->add_option("--schema", common.schema, "Schema JSON (default: Travel)");
  retrieve->add_option("--query", ret.query, "Query as Name=value,... (omitted features are missing)");
  retrieve->add_option("--query-case", ret.query_case, "Use a stored case's problem as the query");
  retrieve->add_option("--query-id", ret.query_id, "Query id (keys the acceptance draws)");
  retrieve->add_option("--budget", ret.budget, "Budget (default: mean package price)");
  retrieve->add_option("--k", ret.k, "Number of cases to return")->default_val(5);
  retrieve->add_option("--st", ret.st, "Solution-similarity edge threshold")->default_val(0.9);
  retrieve->add_option("--pt", ret.pt, "Belief threshold for MRF candidates")->default_val(0.9);
  retrieve->add_option("--engine", ret.engine, "mean_field | loopy_bp | exact")->default_val("mean_field");
  retrieve->add_option("--levels", ret.levels, "binary | four")
      ->default_val("binary")
      ->check(CLI::IsMember({"binary", "four"}));
  retrieve->add_option("--accept-p", ret.accept, "Hotel acceptance probability")->default_val(0.8);
  retrieve->add_option("--seed", ret.seed, "Acceptance seed")->default_val(1);
  retrieve->add_flag("--knn-only", ret.knn_only, "Skip the MRF stage");
  retrieve->add_option("--out,-o", ret.out, "Write CSV here instead of stdout");

  auto* eval = app.add_subcommand("eval", "Cross-validated kNN vs kNN+MRF sweep");
  eval->add_option("--cases", common.cases, "Case base CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--schema", common.schema, "Schema JSON (default: Travel)");
  eval->add_option("--config", ev.config, "Sweep config JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--out,-o", ev.out, "Output directory")->required();
  eval->add_option("--jobs,-j", ev.jobs, "Parallel fold workers")->default_val(1);

  auto* mrf = app.add_subcommand("mrf", "MRF inspection");
  mrf->require_subcommand(1);
  auto* dump_cmd = mrf->add_subcommand("dump", "Write the MRF edge list");
  dump_cmd->add_option("--cases", common.cases, "Case base CSV")->required()->check(CLI::ExistingFile);
  dump_cmd->add_option("--schema", common.schema, "Schema JSON (default: Travel)");
  dump_cmd->add_option("--st", dump.st, "Solution-similarity edge threshold")->default_val(0.9);
  dump_cmd->add_option("--levels", dump.levels, "Number of adaptation levels")->default_val(2);
  dump_cmd->add_option("--out,-o", dump.out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_dataset_gen(ds, common);
    if (*validate) return cmd_dataset_validate(ds, common);
    if (*retrieve) return cmd_retrieve(ret, common);
    if (*eval) return cmd_eval(ev, common);
    if (*dump_cmd) return cmd_mrf_dump(dump, common);
  } catch (const agr::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const agr::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
