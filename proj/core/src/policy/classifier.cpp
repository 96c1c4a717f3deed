#include "claimforge/policy/classifier.h"

#include "claimforge/error.h"
#include "claimforge/lexedit/edit_action.h"
#include "layers.h"

namespace claimforge::policy {

using detail::LayerNorm;
using detail::Linear;

struct ActionClassifier::Impl {
  Linear in;
  LayerNorm ln;
  Linear fc;
  Linear out;

  struct Trace {
    Matrix enc;
    Matrix a;
    LayerNorm::Cache ln_cache;
    Matrix b;
    Matrix pre;
    Matrix act;
  };

  Matrix run(const StateEncoder& encoder, std::span<const EncodedState> states, Trace& tr) const {
    if (states.empty()) throw Error(ErrorCode::kShapeMismatch, "empty batch");
    tr.enc.resize(static_cast<Eigen::Index>(states.size()), encoder.dim());
    for (std::size_t i = 0; i < states.size(); ++i) {
      tr.enc.row(static_cast<Eigen::Index>(i)) = encoder.encode(states[i]);
    }
    tr.a = in.forward(tr.enc);
    tr.b = ln.forward(tr.a, &tr.ln_cache);
    tr.pre = fc.forward(tr.b);
    tr.act = detail::gelu(tr.pre);
    return out.forward(tr.act);
  }
};

ActionClassifier::ActionClassifier(PolicyConfig config)
    : config_(config), impl_(std::make_unique<Impl>()) {
  config_.validate();
  const int D = config_.embed_dim;
  encoder_ = std::make_unique<StateEncoder>(config_.state_encoder, D, config_.encoder_buckets,
                                            config_.seed, params_);
  std::mt19937_64 rng(config_.seed);
  impl_->in = Linear::create(params_, "classifier.in", D, D, rng);
  impl_->ln = LayerNorm::create(params_, "classifier.ln", D);
  impl_->fc = Linear::create(params_, "classifier.fc", D, 4 * D, rng);
  impl_->out = Linear::create(params_, "classifier.out", 4 * D, lexedit::kActionSpaceSize, rng);
}

ActionClassifier::~ActionClassifier() = default;
ActionClassifier::ActionClassifier(ActionClassifier&&) noexcept = default;
ActionClassifier& ActionClassifier::operator=(ActionClassifier&&) noexcept = default;

Matrix ActionClassifier::logits(std::span<const EncodedState> states) const {
  Impl::Trace tr;
  return impl_->run(*encoder_, states, tr);
}

RowVector ActionClassifier::logits(std::string_view text) const {
  const EncodedState s = encoder_->prepare(text);
  return logits(std::span<const EncodedState>(&s, 1)).row(0);
}

int ActionClassifier::classify(std::string_view text) const {
  Eigen::Index best = 0;
  logits(text).maxCoeff(&best);
  return static_cast<int>(best);
}

namespace {

std::vector<int> checked_targets(std::span<const EncodedState> states, std::span<const int> actions) {
  if (states.size() != actions.size()) {
    throw Error(ErrorCode::kShapeMismatch, "states and actions differ in length");
  }
  for (int a : actions) {
    if (a < 0 || a >= lexedit::kActionSpaceSize) {
      throw Error(ErrorCode::kShapeMismatch, "action id outside [0, 128)");
    }
  }
  return {actions.begin(), actions.end()};
}

}  // namespace

double ActionClassifier::loss(std::span<const EncodedState> states,
                              std::span<const int> actions) const {
  const auto targets = checked_targets(states, actions);
  return detail::cross_entropy(logits(states), targets, nullptr);
}

double ActionClassifier::loss_and_backward(std::span<const EncodedState> states,
                                           std::span<const int> actions) {
  const auto targets = checked_targets(states, actions);
  Impl::Trace tr;
  const Matrix z = impl_->run(*encoder_, states, tr);
  Matrix dz;
  const double loss = detail::cross_entropy(z, targets, &dz);
  const Matrix dact = impl_->out.backward(tr.act, dz);
  const Matrix dpre = detail::gelu_backward(tr.pre, dact);
  const Matrix db = impl_->fc.backward(tr.b, dpre);
  const Matrix da = impl_->ln.backward(tr.ln_cache, db);
  const Matrix denc = impl_->in.backward(tr.enc, da);
  for (std::size_t i = 0; i < states.size(); ++i) {
    encoder_->backward(states[i], denc.row(static_cast<Eigen::Index>(i)));
  }
  return loss;
}

}  // namespace claimforge::policy
