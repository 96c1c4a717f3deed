#pragma once

#include <memory>
#include <span>
#include <vector>

#include "claimforge/policy/config.h"
#include "claimforge/policy/encoder.h"
#include "claimforge/policy/params.h"

namespace claimforge::policy {

struct DtStep {
  double rtg = 0.0;
  int state = 0;   // index into the EncodedState array passed alongside
  int action = 0;  // flat id; ignored for the step being predicted
};

// Unpadded; 1 <= steps.size() <= K.
struct DtSequence {
  std::vector<DtStep> steps;
};

// GPT-style decoder over interleaved (rtg, state, action) tokens, 3K per
// sequence. Short sequences are left-padded; padded tokens are masked out of
// attention for real tokens and out of the loss. Action logits are read at
// state-token positions. Forward passes are const and reentrant.
class DecisionTransformer {
 public:
  explicit DecisionTransformer(PolicyConfig config);
  ~DecisionTransformer();
  DecisionTransformer(DecisionTransformer&&) noexcept;
  DecisionTransformer& operator=(DecisionTransformer&&) noexcept;

  const PolicyConfig& config() const noexcept { return config_; }
  const StateEncoder& encoder() const noexcept { return *encoder_; }
  ParamSet& params() noexcept { return params_; }
  const ParamSet& params() const noexcept { return params_; }

  // One K x 128 matrix per sequence; row K - len + t holds step t.
  // Throws Error(kShapeMismatch) for empty or over-long sequences and
  // out-of-range action or state indices.
  std::vector<Matrix> forward(std::span<const DtSequence> batch,
                              std::span<const EncodedState> states) const;

  // Mean cross-entropy of recorded actions over all real steps. Gradients
  // are accumulated into params().
  double loss(std::span<const DtSequence> batch, std::span<const EncodedState> states) const;
  double loss_and_backward(std::span<const DtSequence> batch,
                           std::span<const EncodedState> states);

  // Default inference target, set by training.
  double target_rtg = 1.0;

 private:
  struct Impl;
  PolicyConfig config_;
  ParamSet params_;
  std::unique_ptr<StateEncoder> encoder_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace claimforge::policy
