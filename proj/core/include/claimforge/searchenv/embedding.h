#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace claimforge::searchenv {

enum class EmbeddingMode : std::uint8_t { kHashedBow = 0, kExternal = 1 };

// Text -> unit-norm vector. Implementations are safe for concurrent use.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingMode mode() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;
  virtual std::vector<float> embed(std::string_view text) const = 0;
};

// Analyzed terms hashed into `dim` buckets with term-frequency weights, then
// L2-normalized. Throws Error(kEmptyQuery) when the text has no terms.
class HashedBowEmbedder final : public Embedder {
 public:
  explicit HashedBowEmbedder(std::size_t dim = 256);

  EmbeddingMode mode() const noexcept override { return EmbeddingMode::kHashedBow; }
  std::size_t dim() const noexcept override { return dim_; }
  std::vector<float> embed(std::string_view text) const override;

  std::size_t bucket(std::string_view term) const noexcept;

 private:
  std::size_t dim_;
};

// Client for an embedding service: POST {base_url}/embed with
// {"texts":[...]} answering {"vectors":[[...]]}. Responses are cached by
// text hash. Failures raise Error(kEmbeddingServiceUnavailable).
class ExternalEmbedder final : public Embedder {
 public:
  ExternalEmbedder(std::string base_url, std::size_t dim, double timeout_seconds = 10.0);

  EmbeddingMode mode() const noexcept override { return EmbeddingMode::kExternal; }
  std::size_t dim() const noexcept override { return dim_; }
  std::vector<float> embed(std::string_view text) const override;

  const std::string& base_url() const noexcept { return base_url_; }
  std::size_t cache_size() const;

 private:
  std::string base_url_;
  std::size_t dim_;
  double timeout_seconds_;
  struct Entry {
    std::string text;
    std::vector<float> vector;
  };
  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<std::uint64_t, Entry> cache_;
};

}  // namespace claimforge::searchenv
