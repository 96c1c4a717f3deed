#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "claimforge/lexedit/edit_action.h"
#include "claimforge/lexedit/lexicon.h"
#include "claimforge/lexedit/tokenized_claim.h"
#include "claimforge/policy/classifier.h"
#include "claimforge/policy/decision_transformer.h"
#include "claimforge/searchenv/reward.h"

namespace claimforge::policy {

struct RolloutRecord {
  std::string claim_id;
  std::string original_text;
  double original_reward = 0.0;
  std::vector<int> actions;         // flat ids, in order applied
  std::vector<std::string> texts;   // query after each action
  std::vector<double> rewards;      // reward after each action
  std::vector<double> rtg_inputs;   // rtg fed to the model at each step
  double final_reward() const { return rewards.empty() ? original_reward : rewards.back(); }
  const std::string& final_text() const { return texts.empty() ? original_text : texts.back(); }
};

class Rewriter {
 public:
  virtual ~Rewriter() = default;
  virtual std::string name() const = 0;
  virtual RolloutRecord rewrite(const lexedit::TokenizedClaim& claim,
                                const lexedit::Lexicon& lexicon,
                                const searchenv::Scorer& scorer) const = 0;
};

// Leaves the claim untouched.
class IdentityRewriter final : public Rewriter {
 public:
  std::string name() const override { return "claim"; }
  RolloutRecord rewrite(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon,
                        const searchenv::Scorer& scorer) const override;
};

// Uniform legal actions; the generator is seeded from (seed, claim_id).
std::vector<lexedit::EditAction> random_policy(const lexedit::TokenizedClaim& claim,
                                               const lexedit::Lexicon& lexicon, int n_edits,
                                               std::uint64_t seed);

class RandomRewriter final : public Rewriter {
 public:
  RandomRewriter(int n_edits, std::uint64_t seed) : n_edits_(n_edits), seed_(seed) {}
  std::string name() const override { return "random"; }
  RolloutRecord rewrite(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon,
                        const searchenv::Scorer& scorer) const override;

 private:
  int n_edits_;
  std::uint64_t seed_;
};

struct RolloutOptions {
  std::optional<double> target_rtg;  // model default when unset
  // Stop when the unmasked argmax is illegal instead of masking it out.
  bool terminate_on_illegal = false;
};

// Up to K steps of: predict, mask illegal actions to -inf, take the argmax
// (lowest id on ties), apply, score, decrement the rtg. Stops at reward 1 or
// when no legal action remains.
RolloutRecord rollout(const DecisionTransformer& model, const lexedit::TokenizedClaim& claim,
                      const lexedit::Lexicon& lexicon, const searchenv::Scorer& scorer,
                      const RolloutOptions& options = {});

class DtRewriter final : public Rewriter {
 public:
  DtRewriter(const DecisionTransformer& model, RolloutOptions options, std::string name = "dt")
      : model_(&model), options_(options), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  RolloutRecord rewrite(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon,
                        const searchenv::Scorer& scorer) const override {
    return rollout(*model_, claim, lexicon, scorer, options_);
  }

 private:
  const DecisionTransformer* model_;
  RolloutOptions options_;
  std::string name_;
};

// Applies the classifier once, or greedily up to `max_steps` times.
class ClassifierRewriter final : public Rewriter {
 public:
  ClassifierRewriter(const ActionClassifier& model, bool iterated, int max_steps)
      : model_(&model), iterated_(iterated), max_steps_(max_steps) {}
  std::string name() const override { return iterated_ ? "classifier_iterated" : "classifier"; }
  RolloutRecord rewrite(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon,
                        const searchenv::Scorer& scorer) const override;

 private:
  const ActionClassifier* model_;
  bool iterated_;
  int max_steps_;
};

// Argmax over legal actions of `logits` (128 entries); -1 when none legal.
int masked_argmax(const RowVector& logits, const lexedit::TokenizedClaim& claim,
                  const lexedit::Lexicon& lexicon);

}  // namespace claimforge::policy
