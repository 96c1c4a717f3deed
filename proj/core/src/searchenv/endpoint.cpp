#include "claimforge/searchenv/endpoint.h"

#include <fstream>

#include "../common/binary_io.h"
#include "claimforge/error.h"
#include "claimforge/searchenv/bm25_index.h"
#include "claimforge/searchenv/hnsw_index.h"

namespace claimforge::searchenv {

std::string_view backend_name(BackendKind kind) noexcept {
  return kind == BackendKind::kBm25 ? "bm25" : "knn";
}

std::optional<BackendKind> parse_backend(std::string_view name) noexcept {
  if (name == "bm25") return BackendKind::kBm25;
  if (name == "knn") return BackendKind::kKnn;
  return std::nullopt;
}

std::unique_ptr<SearchEndpoint> build_index(const Corpus& corpus, BackendKind backend,
                                            const IndexOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot index an empty corpus");
  switch (backend) {
    case BackendKind::kBm25:
      return std::make_unique<Bm25Index>(corpus, options.bm25, options.top_k);
    case BackendKind::kKnn:
      return std::make_unique<KnnIndex>(corpus, options.embedder, options.hnsw, options.top_k);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend");
}

std::unique_ptr<SearchEndpoint> load_index(const std::filesystem::path& path,
                                           std::shared_ptr<const Embedder> embedder) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  detail::expect_magic(in, "CFIX");
  const auto version = detail::read_pod<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported index snapshot version " +
                                             std::to_string(version));
  }
  const auto kind = detail::read_pod<std::uint32_t>(in);
  if (kind == static_cast<std::uint32_t>(BackendKind::kBm25)) {
    return Bm25Index::read_payload(in, 0);
  }
  if (kind != static_cast<std::uint32_t>(BackendKind::kKnn)) {
    throw Error(ErrorCode::kFormatError, "unknown backend kind " + std::to_string(kind));
  }
  const auto top_k = detail::read_pod<std::uint64_t>(in);
  const auto mode = detail::read_pod<std::uint8_t>(in);
  const auto dim = detail::read_pod<std::uint64_t>(in);
  const auto url = detail::read_string(in);
  const auto n_docs = detail::read_pod<std::uint64_t>(in);
  std::vector<std::string> ids;
  ids.reserve(n_docs);
  for (std::uint64_t i = 0; i < n_docs; ++i) ids.push_back(detail::read_string(in));
  auto graph = HnswGraph::read(in);
  if (!embedder) {
    if (mode == static_cast<std::uint8_t>(EmbeddingMode::kHashedBow)) {
      embedder = std::make_shared<HashedBowEmbedder>(dim);
    } else {
      embedder = std::make_shared<ExternalEmbedder>(url, dim);
    }
  }
  return std::make_unique<KnnIndex>(std::move(ids), std::move(graph), std::move(embedder), top_k);
}

}  // namespace claimforge::searchenv
