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

// Walks one query through the library: kNN, adaptation, and the MRF
// stage that replaces unadaptable cases.
//
//   agr_demo [cases.csv]
//
// Without an argument it generates a 1500-case synthetic base.

#include <iomanip>
#include <iostream>

#include "agr/agr.hpp"

int main(int argc, char** argv) {
  using namespace agr;
  try {
    const FeatureSchema schema = FeatureSchema::travel();
    const CaseBase library =
        with_stats(argc > 1 ? load_csv(std::string(argv[1]), schema) : generate_synthetic(1500, 1));
    const CaseBaseStats& stats = library.stats();
    std::cout << library.size() << " cases, mean price " << stats.mean_price
              << ", mean similarity " << stats.mean_similarity << "\n";

    const MetricMrf mrf = build_mrf(library, 0.9, 2);
    const InferenceIndex index(mrf, {});
    std::cout << "MRF: " << mrf.edges().size() << " edges in " << index.components().size()
              << " components\n";

    // Use the first case as a query with some requirements left open.
    Query q = query_from_case(library[0], schema, stats.mean_price);
    q = inject_missing(q, MissingnessProfile::standard(), 42);
    const AdaptationLibrary rules(library);
    QueryAdaptations adaptations(library, rules, q, AcceptanceModel::bernoulli(0.8, 1),
                                 LevelMapping::binary());

    const std::size_t k = std::min<std::size_t>(10, library.size());
    const auto result = agr_retrieve(q, library, index, k, CondSpec::threshold_collapse(1, 0.9),
                                     adaptations);
    std::cout << "k = " << k << ", adaptable among kNN: " << result.adaptable_knn << "\n";
    for (const auto& rc : result.ranked) {
      const Case& c = library[*library.index_of(rc.id)];
      std::cout << std::setw(6) << rc.id << "  " << to_string(rc.source) << "  sim "
                << std::fixed << std::setprecision(3) << rc.similarity << "  "
                << std::get<std::string>(c.values[5]) << ", " << c.hotel.name << ", price "
                << std::setprecision(0) << std::get<double>(c.values[7]) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
