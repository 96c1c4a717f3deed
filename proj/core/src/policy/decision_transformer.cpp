#include "claimforge/policy/decision_transformer.h"

#include <string>

#include "claimforge/error.h"
#include "claimforge/lexedit/edit_action.h"
#include "layers.h"

namespace claimforge::policy {

using detail::Block;
using detail::LayerNorm;
using detail::Linear;

struct DecisionTransformer::Impl {
  Linear rtg_in;
  Linear state_in;
  Param* action_emb = nullptr;
  Param* time_emb = nullptr;
  LayerNorm embed_ln;
  std::vector<Block> blocks;
  LayerNorm final_ln;
  Linear head;

  struct Slot {
    bool valid = false;
    int step = 0;
    int state = -1;
    int action = 0;
  };

  struct Trace {
    detail::AttentionLayout layout;
    std::vector<Slot> slots;  // samples * K
    Matrix rtg_x;
    Matrix enc;
    LayerNorm::Cache embed_cache;
    std::vector<Block::Cache> block_caches;
    LayerNorm::Cache final_cache;
    Matrix gathered;
  };

  Matrix run(const PolicyConfig& cfg, const StateEncoder& encoder,
             std::span<const DtSequence> batch, std::span<const EncodedState> states,
             Trace& tr, bool keep) const;
  void backward(const PolicyConfig& cfg, const StateEncoder& encoder,
                std::span<const EncodedState> states, const Trace& tr,
                const Matrix& dlogits) const;
};

Matrix DecisionTransformer::Impl::run(const PolicyConfig& cfg, const StateEncoder& encoder,
                                      std::span<const DtSequence> batch,
                                      std::span<const EncodedState> states, Trace& tr,
                                      bool keep) const {
  const int K = cfg.block_size;
  const int D = cfg.embed_dim;
  const int B = static_cast<int>(batch.size());
  const int L = 3 * K;
  if (B == 0) throw Error(ErrorCode::kShapeMismatch, "empty batch");

  tr.slots.assign(static_cast<std::size_t>(B) * K, Slot{});
  tr.layout.samples = B;
  tr.layout.seq_len = L;
  tr.layout.valid.assign(static_cast<std::size_t>(B) * L, 0);
  tr.rtg_x = Matrix::Zero(static_cast<Eigen::Index>(B) * K, 1);
  tr.enc = Matrix::Zero(static_cast<Eigen::Index>(B) * K, D);
  for (int s = 0; s < B; ++s) {
    const auto& steps = batch[s].steps;
    const int T = static_cast<int>(steps.size());
    if (T < 1 || T > K) {
      throw Error(ErrorCode::kShapeMismatch, "sequence length " + std::to_string(T) +
                                                 " outside [1, " + std::to_string(K) + "]");
    }
    const int pad = K - T;
    for (int t = 0; t < T; ++t) {
      const auto& st = steps[t];
      if (st.action < 0 || st.action >= lexedit::kActionSpaceSize) {
        throw Error(ErrorCode::kShapeMismatch, "action id outside [0, 128)");
      }
      if (st.state < 0 || static_cast<std::size_t>(st.state) >= states.size()) {
        throw Error(ErrorCode::kShapeMismatch, "state index out of range");
      }
      const int slot = s * K + pad + t;
      tr.slots[slot] = Slot{true, t, st.state, st.action};
      tr.rtg_x(slot, 0) = st.rtg;
      tr.enc.row(slot) = encoder.encode(states[st.state]);
      for (int j = 0; j < 3; ++j) tr.layout.valid[static_cast<std::size_t>(s) * L + 3 * (pad + t) + j] = 1;
    }
  }

  const Matrix r = rtg_in.forward(tr.rtg_x);
  const Matrix st = state_in.forward(tr.enc);
  Matrix x(static_cast<Eigen::Index>(B) * L, D);
  for (int s = 0; s < B; ++s) {
    for (int i = 0; i < K; ++i) {
      const int slot = s * K + i;
      const auto& sl = tr.slots[slot];
      const auto time = time_emb->value.row(sl.step);
      const Eigen::Index base = static_cast<Eigen::Index>(s) * L + 3 * i;
      x.row(base) = r.row(slot) + time;
      x.row(base + 1) = st.row(slot) + time;
      x.row(base + 2) = action_emb->value.row(sl.action) + time;
    }
  }

  Matrix h = embed_ln.forward(x, keep ? &tr.embed_cache : nullptr);
  tr.block_caches.resize(keep ? blocks.size() : 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    h = blocks[b].forward(h, tr.layout, keep ? &tr.block_caches[b] : nullptr);
  }
  h = final_ln.forward(h, keep ? &tr.final_cache : nullptr);
  Matrix gathered(static_cast<Eigen::Index>(B) * K, D);
  for (int s = 0; s < B; ++s) {
    for (int i = 0; i < K; ++i) {
      gathered.row(s * K + i) = h.row(static_cast<Eigen::Index>(s) * L + 3 * i + 1);
    }
  }
  Matrix logits = head.forward(gathered);
  if (keep) tr.gathered = std::move(gathered);
  return logits;
}

void DecisionTransformer::Impl::backward(const PolicyConfig& cfg, const StateEncoder& encoder,
                                         std::span<const EncodedState> states, const Trace& tr,
                                         const Matrix& dlogits) const {
  const int K = cfg.block_size;
  const int D = cfg.embed_dim;
  const int B = tr.layout.samples;
  const int L = tr.layout.seq_len;
  const Matrix dgathered = head.backward(tr.gathered, dlogits);
  Matrix dh = Matrix::Zero(static_cast<Eigen::Index>(B) * L, D);
  for (int s = 0; s < B; ++s) {
    for (int i = 0; i < K; ++i) {
      dh.row(static_cast<Eigen::Index>(s) * L + 3 * i + 1) = dgathered.row(s * K + i);
    }
  }
  dh = final_ln.backward(tr.final_cache, dh);
  for (std::size_t b = blocks.size(); b-- > 0;) {
    dh = blocks[b].backward(tr.block_caches[b], tr.layout, dh);
  }
  const Matrix dx = embed_ln.backward(tr.embed_cache, dh);

  Matrix dr(static_cast<Eigen::Index>(B) * K, D);
  Matrix dst(static_cast<Eigen::Index>(B) * K, D);
  for (int s = 0; s < B; ++s) {
    for (int i = 0; i < K; ++i) {
      const int slot = s * K + i;
      const auto& sl = tr.slots[slot];
      const Eigen::Index base = static_cast<Eigen::Index>(s) * L + 3 * i;
      dr.row(slot) = dx.row(base);
      dst.row(slot) = dx.row(base + 1);
      action_emb->grad.row(sl.action) += dx.row(base + 2);
      time_emb->grad.row(sl.step) += dx.row(base) + dx.row(base + 1) + dx.row(base + 2);
    }
  }
  rtg_in.backward(tr.rtg_x, dr);
  const Matrix denc = state_in.backward(tr.enc, dst);
  for (std::size_t slot = 0; slot < tr.slots.size(); ++slot) {
    const auto& sl = tr.slots[slot];
    if (sl.valid) encoder.backward(states[sl.state], denc.row(static_cast<Eigen::Index>(slot)));
  }
}

DecisionTransformer::DecisionTransformer(PolicyConfig config)
    : config_(config), impl_(std::make_unique<Impl>()) {
  config_.validate();
  const int D = config_.embed_dim;
  encoder_ = std::make_unique<StateEncoder>(config_.state_encoder, D, config_.encoder_buckets,
                                            config_.seed, params_);
  std::mt19937_64 rng(config_.seed);
  auto& m = *impl_;
  m.rtg_in = Linear::create(params_, "embed.rtg", 1, D, rng);
  m.state_in = Linear::create(params_, "embed.state", D, D, rng);
  m.action_emb = &params_.add_normal("embed.action", lexedit::kActionSpaceSize, D, detail::kInitStd, rng);
  m.time_emb = &params_.add_normal("embed.timestep", config_.block_size, D, detail::kInitStd, rng);
  m.embed_ln = LayerNorm::create(params_, "embed.ln", D);
  for (int l = 0; l < config_.n_layers; ++l) {
    m.blocks.push_back(Block::create(params_, "block" + std::to_string(l), D, config_.n_heads, rng));
  }
  m.final_ln = LayerNorm::create(params_, "final.ln", D);
  m.head = Linear::create(params_, "head", D, lexedit::kActionSpaceSize, rng);
}

DecisionTransformer::~DecisionTransformer() = default;
DecisionTransformer::DecisionTransformer(DecisionTransformer&&) noexcept = default;
DecisionTransformer& DecisionTransformer::operator=(DecisionTransformer&&) noexcept = default;

std::vector<Matrix> DecisionTransformer::forward(std::span<const DtSequence> batch,
                                                 std::span<const EncodedState> states) const {
  Impl::Trace tr;
  const Matrix logits = impl_->run(config_, *encoder_, batch, states, tr, false);
  const int K = config_.block_size;
  std::vector<Matrix> out;
  out.reserve(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    out.emplace_back(logits.middleRows(static_cast<Eigen::Index>(s) * K, K));
  }
  return out;
}

double DecisionTransformer::loss(std::span<const DtSequence> batch,
                                 std::span<const EncodedState> states) const {
  Impl::Trace tr;
  const Matrix logits = impl_->run(config_, *encoder_, batch, states, tr, false);
  std::vector<Eigen::Index> rows;
  std::vector<int> targets;
  for (std::size_t slot = 0; slot < tr.slots.size(); ++slot) {
    if (tr.slots[slot].valid) {
      rows.push_back(static_cast<Eigen::Index>(slot));
      targets.push_back(tr.slots[slot].action);
    }
  }
  Matrix picked(static_cast<Eigen::Index>(rows.size()), logits.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) picked.row(static_cast<Eigen::Index>(i)) = logits.row(rows[i]);
  return detail::cross_entropy(picked, targets, nullptr);
}

double DecisionTransformer::loss_and_backward(std::span<const DtSequence> batch,
                                              std::span<const EncodedState> states) {
  Impl::Trace tr;
  const Matrix logits = impl_->run(config_, *encoder_, batch, states, tr, true);
  std::vector<Eigen::Index> rows;
  std::vector<int> targets;
  for (std::size_t slot = 0; slot < tr.slots.size(); ++slot) {
    if (tr.slots[slot].valid) {
      rows.push_back(static_cast<Eigen::Index>(slot));
      targets.push_back(tr.slots[slot].action);
    }
  }
  Matrix picked(static_cast<Eigen::Index>(rows.size()), logits.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) picked.row(static_cast<Eigen::Index>(i)) = logits.row(rows[i]);
  Matrix dpicked;
  const double loss = detail::cross_entropy(picked, targets, &dpicked);
  Matrix dlogits = Matrix::Zero(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) dlogits.row(rows[i]) = dpicked.row(static_cast<Eigen::Index>(i));
  impl_->backward(config_, *encoder_, states, tr, dlogits);
  return loss;
}

}  // namespace claimforge::policy
