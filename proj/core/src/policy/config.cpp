#include "claimforge/policy/config.h"

#include "claimforge/error.h"

namespace claimforge::policy {

std::string_view encoder_kind_name(EncoderKind kind) noexcept {
  return kind == EncoderKind::kTrainable ? "trainable" : "frozen";
}

std::optional<EncoderKind> parse_encoder_kind(std::string_view name) noexcept {
  if (name == "trainable") return EncoderKind::kTrainable;
  if (name == "frozen") return EncoderKind::kFrozen;
  return std::nullopt;
}

void PolicyConfig::validate() const {
  auto bad = [](const std::string& what) { return Error(ErrorCode::kInvalidArgument, what); };
  if (n_layers < 1) throw bad("n_layers must be >= 1");
  if (n_heads < 1) throw bad("n_heads must be >= 1");
  if (embed_dim < 1 || embed_dim % n_heads != 0) {
    throw bad("embed_dim must be a positive multiple of n_heads");
  }
  if (block_size < 1) throw bad("block_size must be >= 1");
  if (encoder_buckets < 1) throw bad("encoder_buckets must be >= 1");
  if (!(learning_rate > 0.0)) throw bad("learning_rate must be > 0");
  if (epochs < 0) throw bad("epochs must be >= 0");
  if (batch_size < 1) throw bad("batch_size must be >= 1");
}

}  // namespace claimforge::policy
