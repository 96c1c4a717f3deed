#pragma once

#include <memory>
#include <span>
#include <string_view>

#include "claimforge/policy/config.h"
#include "claimforge/policy/encoder.h"
#include "claimforge/policy/params.h"

namespace claimforge::policy {

// One-step 128-way action classifier:
// encoder -> Linear -> LayerNorm -> Linear(4D) -> GELU -> Linear(128).
class ActionClassifier {
 public:
  explicit ActionClassifier(PolicyConfig config);
  ~ActionClassifier();
  ActionClassifier(ActionClassifier&&) noexcept;
  ActionClassifier& operator=(ActionClassifier&&) noexcept;

  const PolicyConfig& config() const noexcept { return config_; }
  const StateEncoder& encoder() const noexcept { return *encoder_; }
  ParamSet& params() noexcept { return params_; }
  const ParamSet& params() const noexcept { return params_; }

  // One row of 128 logits per state.
  Matrix logits(std::span<const EncodedState> states) const;
  RowVector logits(std::string_view text) const;
  int classify(std::string_view text) const;  // unmasked argmax

  double loss(std::span<const EncodedState> states, std::span<const int> actions) const;
  double loss_and_backward(std::span<const EncodedState> states, std::span<const int> actions);

 private:
  struct Impl;
  PolicyConfig config_;
  ParamSet params_;
  std::unique_ptr<StateEncoder> encoder_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace claimforge::policy
