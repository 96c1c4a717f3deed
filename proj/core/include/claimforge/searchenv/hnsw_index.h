#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "claimforge/searchenv/endpoint.h"

namespace claimforge::searchenv {

struct Neighbor {
  std::uint32_t id;
  float similarity;
};

// Hierarchical navigable small-world graph over unit vectors with cosine
// similarity. Level assignment draws from a seeded generator, so inserting
// the same vectors in the same order yields the same graph.
class HnswGraph {
 public:
  HnswGraph(std::size_t dim, HnswParams params);

  // Returns the new node id (insertion order). Not thread-safe.
  std::uint32_t add(std::span<const float> vec);

  // Up to k nearest nodes, most similar first; ties by ascending `tie_rank`
  // (node id when empty).
  std::vector<Neighbor> search(std::span<const float> query, std::size_t k, std::size_t ef,
                               std::span<const std::uint32_t> tie_rank = {}) const;

  std::size_t size() const noexcept { return levels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const HnswParams& params() const noexcept { return params_; }
  std::span<const float> vector(std::uint32_t id) const {
    return {vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }
  int max_level() const noexcept { return max_level_; }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t id, int level) const {
    return links_[id][level];
  }

  void write(std::ostream& out) const;
  static HnswGraph read(std::istream& in);

  bool operator==(const HnswGraph& other) const;

 private:
  struct Candidate {
    float sim;
    std::uint32_t id;
  };
  float similarity(std::span<const float> q, std::uint32_t id) const;
  std::vector<Candidate> search_layer(std::span<const float> q, std::uint32_t entry, std::size_t ef,
                                      int level, std::vector<std::uint32_t>& visited_mark,
                                      std::uint32_t& visit_epoch) const;
  std::vector<std::uint32_t> select_neighbors(std::vector<Candidate> candidates,
                                              std::size_t m) const;
  std::size_t max_links(int level) const noexcept { return level == 0 ? 2 * params_.m : params_.m; }
  int draw_level();

  std::size_t dim_;
  HnswParams params_;
  double level_mult_;
  std::mt19937_64 rng_;
  std::vector<float> vectors_;
  std::vector<int> levels_;
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  std::uint32_t entry_point_ = 0;
  int max_level_ = -1;
  std::vector<std::uint32_t> scratch_mark_;  // visit marks for add()
  std::uint32_t scratch_epoch_ = 0;
};

// Exact cosine kNN by linear scan (test oracle and recall reference).
std::vector<Neighbor> brute_force_knn(const HnswGraph& graph, std::span<const float> query,
                                      std::size_t k);

// Approximate kNN endpoint: documents embedded once at build time, queries
// embedded on arrival.
class KnnIndex final : public SearchEndpoint {
 public:
  KnnIndex(const Corpus& corpus, std::shared_ptr<const Embedder> embedder, HnswParams params,
           std::size_t top_k);
  KnnIndex(std::vector<std::string> doc_ids, HnswGraph graph,
           std::shared_ptr<const Embedder> embedder, std::size_t top_k);

  BackendKind backend() const noexcept override { return BackendKind::kKnn; }
  std::vector<ScoredDoc> query(std::string_view text, std::size_t k) const override;
  using SearchEndpoint::query;
  std::size_t size() const noexcept override { return doc_ids_.size(); }
  void save(const std::filesystem::path& path) const override;

  const HnswGraph& graph() const noexcept { return graph_; }
  const Embedder& embedder() const noexcept { return *embedder_; }

 private:
  void rank_ids();

  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> id_rank_;
  HnswGraph graph_;
  std::shared_ptr<const Embedder> embedder_;
};

}  // namespace claimforge::searchenv
