#include "claimforge/evalharness/ablation.h"

#include <cstdio>
#include <sstream>

#include "claimforge/error.h"

namespace claimforge::evalharness {

namespace {

std::string cell_name(const AblationKey& k) {
  return std::string(searchenv::backend_name(k.backend)) + "/" +
         std::string(searchenv::metric_name(k.metric)) + "/" +
         (k.include_negative ? "up+down" : "up");
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

}  // namespace

std::vector<AblationKey> AblationGrid::cells() const {
  std::vector<AblationKey> out;
  for (const auto b : backends) {
    for (const bool neg : include_negative) {
      for (const auto m : metrics) out.push_back(AblationKey{b, m, neg});
    }
  }
  return out;
}

const AblationCell& AblationMatrix::at(const AblationKey& key) const {
  for (const auto& c : cells) {
    if (c.key == key) return c;
  }
  throw Error(ErrorCode::kMissingCell, "no ablation cell " + cell_name(key));
}

AblationMatrix ablation_matrix(const AblationGrid& grid,
                               const std::map<AblationKey, EvalReport>& reports) {
  AblationMatrix m;
  m.grid = grid;
  for (const auto& key : grid.cells()) {
    const auto it = reports.find(key);
    if (it == reports.end()) {
      throw Error(ErrorCode::kMissingCell, "no evaluation for ablation cell " + cell_name(key));
    }
    m.cells.push_back(AblationCell{key, it->second.original_mean, it->second.rewritten_mean,
                                   it->second.n_claims()});
  }
  return m;
}

std::string render_ablation_table(const AblationMatrix& matrix) {
  const auto& g = matrix.grid;
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"Retriever(Query)"};
  for (const bool neg : g.include_negative) {
    for (const auto m : g.metrics) {
      header.push_back(std::string(neg ? "up+down " : "up ") + std::string(searchenv::metric_name(m)));
    }
  }
  table.push_back(header);
  for (const auto b : g.backends) {
    for (const bool rl : {false, true}) {
      std::vector<std::string> row{std::string(b == searchenv::BackendKind::kBm25 ? "BM25" : "kNN") +
                                   (rl ? " (RL)" : " (claim)")};
      for (const bool neg : g.include_negative) {
        for (const auto m : g.metrics) {
          const auto& c = matrix.at(AblationKey{b, m, neg});
          row.push_back(percent(rl ? c.rl_mean : c.claim_mean));
        }
      }
      table.push_back(std::move(row));
    }
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t i = 0; i < table[r].size(); ++i) {
      if (i) out << "  ";
      const auto& cell = table[r][i];
      if (i == 0) {
        out << cell << std::string(width[i] - cell.size(), ' ');
      } else {
        out << std::string(width[i] - cell.size(), ' ') << cell;
      }
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace claimforge::evalharness
