#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "claimforge/policy/config.h"
#include "claimforge/policy/params.h"
#include "claimforge/searchenv/embedding.h"

namespace claimforge::policy {

// Pre-processed state text. Trainable encoders keep hashed feature ids;
// frozen encoders keep the final vector.
struct EncodedState {
  std::vector<std::uint32_t> features;
  RowVector fixed;
};

// Text -> embed_dim vector.
//   Trainable: mean of learned bucket embeddings over three hashed features
//              per token (word, word at position, 2-char suffix at position).
//   Frozen:    HashedBow(256) vector times a fixed seeded projection.
class StateEncoder {
 public:
  StateEncoder(EncoderKind kind, int dim, std::size_t buckets, std::uint64_t seed,
               ParamSet& params);

  EncoderKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }

  EncodedState prepare(std::string_view text) const;
  RowVector encode(const EncodedState& state) const;
  RowVector encode(std::string_view text) const { return encode(prepare(text)); }

  // Accumulates d(loss)/d(table rows). No-op for frozen encoders.
  void backward(const EncodedState& state, const RowVector& grad) const;

  static std::vector<std::uint32_t> feature_ids(std::string_view text, std::size_t buckets);

 private:
  EncoderKind kind_;
  int dim_;
  std::size_t buckets_;
  Param* table_ = nullptr;       // trainable: buckets x dim
  Param* projection_ = nullptr;  // frozen: 256 x dim, not trained
  searchenv::HashedBowEmbedder bow_;
};

}  // namespace claimforge::policy
