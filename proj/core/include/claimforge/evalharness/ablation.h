#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "claimforge/evalharness/evaluate.h"

namespace claimforge::evalharness {

struct AblationKey {
  searchenv::BackendKind backend;
  searchenv::Metric metric;
  bool include_negative;

  auto operator<=>(const AblationKey&) const = default;
};

struct AblationGrid {
  std::vector<searchenv::BackendKind> backends{searchenv::BackendKind::kBm25,
                                               searchenv::BackendKind::kKnn};
  std::vector<searchenv::Metric> metrics{searchenv::Metric::kAp, searchenv::Metric::kRecall,
                                         searchenv::Metric::kRr};
  std::vector<bool> include_negative{false, true};

  std::vector<AblationKey> cells() const;
};

struct AblationCell {
  AblationKey key;
  double claim_mean = 0.0;
  double rl_mean = 0.0;
  std::size_t n_claims = 0;
};

struct AblationMatrix {
  AblationGrid grid;
  std::vector<AblationCell> cells;  // grid order

  const AblationCell& at(const AblationKey& key) const;
};

// One row per grid cell from the evaluated RL reports. Throws
// Error(kMissingCell) when a cell has no report.
AblationMatrix ablation_matrix(const AblationGrid& grid,
                               const std::map<AblationKey, EvalReport>& reports);

// Retriever rows ("BM25 (claim)", "BM25 (RL)", ...) by metric columns, one
// column group per negative-example setting. Values are percentages.
std::string render_ablation_table(const AblationMatrix& matrix);

}  // namespace claimforge::evalharness
