#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace claimforge::policy {

enum class EncoderKind : std::uint8_t { kTrainable = 0, kFrozen = 1 };

std::string_view encoder_kind_name(EncoderKind kind) noexcept;  // "trainable" | "frozen"
std::optional<EncoderKind> parse_encoder_kind(std::string_view name) noexcept;

struct PolicyConfig {
  int n_layers = 2;
  int n_heads = 4;
  int embed_dim = 128;
  int block_size = 4;  // K: max edits per episode; model sequence length 3K
  EncoderKind state_encoder = EncoderKind::kTrainable;
  std::size_t encoder_buckets = 1u << 14;
  double learning_rate = 3e-4;
  int epochs = 10;
  int batch_size = 32;
  double grad_clip = 1.0;
  std::uint64_t seed = 0;

  // Throws Error(kInvalidArgument).
  void validate() const;
};

}  // namespace claimforge::policy
