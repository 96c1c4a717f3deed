#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "claimforge/searchenv/corpus.h"
#include "claimforge/searchenv/embedding.h"

namespace claimforge::searchenv {

enum class BackendKind : std::uint8_t { kBm25 = 0, kKnn = 1 };

std::string_view backend_name(BackendKind kind) noexcept;  // "bm25" | "knn"
std::optional<BackendKind> parse_backend(std::string_view name) noexcept;

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
};

// Elasticsearch defaults.
struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct HnswParams {
  std::size_t m = 16;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 100;
  std::uint64_t seed = 42;
};

struct IndexOptions {
  Bm25Params bm25;
  HnswParams hnsw;
  std::size_t top_k = 50;
  // KNN only; a HashedBowEmbedder(256) is used when null.
  std::shared_ptr<const Embedder> embedder;
};

// Opaque search endpoint: text in, ranked documents out. Results are sorted
// by descending score with ties broken by ascending doc_id, and at most k
// long. Immutable after construction and safe for concurrent queries.
class SearchEndpoint {
 public:
  virtual ~SearchEndpoint() = default;

  virtual BackendKind backend() const noexcept = 0;

  // Throws Error(kEmptyQuery) for blank text. Text with no indexable terms
  // yields an empty list.
  virtual std::vector<ScoredDoc> query(std::string_view text, std::size_t k) const = 0;
  std::vector<ScoredDoc> query(std::string_view text) const { return query(text, top_k_); }

  std::size_t top_k() const noexcept { return top_k_; }
  virtual std::size_t size() const noexcept = 0;

  // Writes a versioned snapshot: magic "CFIX", u32 format version,
  // u32 backend kind, then the backend payload (little-endian).
  virtual void save(const std::filesystem::path& path) const = 0;

 protected:
  explicit SearchEndpoint(std::size_t top_k) : top_k_(top_k) {}

 private:
  std::size_t top_k_;
};

// Throws Error(kEmptyCorpus) for an empty corpus.
std::unique_ptr<SearchEndpoint> build_index(const Corpus& corpus, BackendKind backend,
                                            const IndexOptions& options = {});

// Throws Error(kFormatError) on a bad magic, version, or truncated payload.
// `embedder` overrides the stored embedding configuration for KNN snapshots.
std::unique_ptr<SearchEndpoint> load_index(const std::filesystem::path& path,
                                           std::shared_ptr<const Embedder> embedder = nullptr);

inline constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace claimforge::searchenv
