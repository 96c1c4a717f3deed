#include "claimforge/policy/encoder.h"

#include "claimforge/error.h"
#include "claimforge/lexedit/tokenizer.h"
#include "claimforge/searchenv/analyzer.h"

namespace claimforge::policy {

namespace {
constexpr std::size_t kBowDim = 256;
}

StateEncoder::StateEncoder(EncoderKind kind, int dim, std::size_t buckets, std::uint64_t seed,
                           ParamSet& params)
    : kind_(kind), dim_(dim), buckets_(buckets), bow_(kBowDim) {
  std::mt19937_64 rng(seed ^ 0x656e636f646572ULL);
  if (kind == EncoderKind::kTrainable) {
    table_ = &params.add_normal("encoder.table", static_cast<Eigen::Index>(buckets), dim, 0.02, rng);
  } else {
    projection_ = &params.add_normal("encoder.projection", kBowDim, dim,
                                     1.0 / std::sqrt(static_cast<double>(kBowDim)), rng,
                                     /*trainable=*/false);
  }
}

std::vector<std::uint32_t> StateEncoder::feature_ids(std::string_view text, std::size_t buckets) {
  std::vector<std::uint32_t> out;
  const auto tokens = lexedit::split_tokens(text);
  out.reserve(tokens.size() * 3);
  auto bucket = [&](const std::string& key) {
    return static_cast<std::uint32_t>(searchenv::fnv1a64(key) % buckets);
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto word = lexedit::to_lower_ascii(tokens[i]);
    const auto pos = std::to_string(i);
    const auto suffix = word.size() > 2 ? word.substr(word.size() - 2) : word;
    out.push_back(bucket("w\x1f" + word));
    out.push_back(bucket("p\x1f" + pos + "\x1f" + word));
    out.push_back(bucket("s\x1f" + pos + "\x1f" + suffix));
  }
  return out;
}

EncodedState StateEncoder::prepare(std::string_view text) const {
  EncodedState s;
  if (kind_ == EncoderKind::kTrainable) {
    s.features = feature_ids(text, buckets_);
    return s;
  }
  std::vector<float> bow;
  try {
    bow = bow_.embed(text);
  } catch (const Error&) {
    bow.assign(kBowDim, 0.0f);
  }
  RowVector v(kBowDim);
  for (std::size_t i = 0; i < kBowDim; ++i) v(static_cast<Eigen::Index>(i)) = bow[i];
  s.fixed = v * projection_->value;
  return s;
}

RowVector StateEncoder::encode(const EncodedState& state) const {
  if (kind_ == EncoderKind::kFrozen) {
    if (state.fixed.size() != dim_) {
      throw Error(ErrorCode::kShapeMismatch, "frozen state vector has the wrong size");
    }
    return state.fixed;
  }
  RowVector out = RowVector::Zero(dim_);
  if (state.features.empty()) return out;
  for (auto f : state.features) {
    if (f >= buckets_) throw Error(ErrorCode::kShapeMismatch, "feature id out of range");
    out += table_->value.row(f);
  }
  return out / static_cast<double>(state.features.size());
}

void StateEncoder::backward(const EncodedState& state, const RowVector& grad) const {
  if (kind_ == EncoderKind::kFrozen || state.features.empty()) return;
  const RowVector g = grad / static_cast<double>(state.features.size());
  for (auto f : state.features) table_->grad.row(f) += g;
}

}  // namespace claimforge::policy
