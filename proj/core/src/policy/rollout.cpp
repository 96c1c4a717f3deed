#include "claimforge/policy/rollout.h"

#include <limits>
#include <random>

#include "claimforge/lexedit/editor.h"
#include "claimforge/searchenv/analyzer.h"

namespace claimforge::policy {

namespace {

constexpr double kPerfect = 1.0 - 1e-12;

RolloutRecord start(const lexedit::TokenizedClaim& claim, const searchenv::Scorer& scorer) {
  RolloutRecord rec;
  rec.claim_id = claim.claim_id();
  rec.original_text = claim.text();
  rec.original_reward = scorer(claim);
  return rec;
}

double record_step(RolloutRecord& rec, lexedit::TokenizedClaim& current, lexedit::EditAction action,
                   const lexedit::Lexicon& lexicon, const searchenv::Scorer& scorer) {
  current = lexedit::apply_action(current, action, lexicon);
  const double r = scorer(current);
  rec.actions.push_back(lexedit::flatten_action(action));
  rec.texts.push_back(current.text());
  rec.rewards.push_back(r);
  return r;
}

}  // namespace

int masked_argmax(const RowVector& logits, const lexedit::TokenizedClaim& claim,
                  const lexedit::Lexicon& lexicon) {
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto action : lexedit::legal_actions(claim, lexicon)) {
    const int flat = lexedit::flatten_action(action);
    if (best < 0 || logits(flat) > best_value) {
      best = flat;
      best_value = logits(flat);
    }
  }
  return best;
}

RolloutRecord IdentityRewriter::rewrite(const lexedit::TokenizedClaim& claim,
                                        const lexedit::Lexicon&,
                                        const searchenv::Scorer& scorer) const {
  return start(claim, scorer);
}

std::vector<lexedit::EditAction> random_policy(const lexedit::TokenizedClaim& claim,
                                               const lexedit::Lexicon& lexicon, int n_edits,
                                               std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(searchenv::fnv1a64(claim.claim_id())),
                    static_cast<std::uint32_t>(searchenv::fnv1a64(claim.claim_id()) >> 32)};
  std::mt19937_64 rng(seq);
  std::vector<lexedit::EditAction> out;
  auto current = claim;
  for (int i = 0; i < n_edits; ++i) {
    const auto legal = lexedit::legal_actions(current, lexicon);
    if (legal.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
    const auto action = legal[pick(rng)];
    current = lexedit::apply_action(current, action, lexicon);
    out.push_back(action);
  }
  return out;
}

RolloutRecord RandomRewriter::rewrite(const lexedit::TokenizedClaim& claim,
                                      const lexedit::Lexicon& lexicon,
                                      const searchenv::Scorer& scorer) const {
  auto rec = start(claim, scorer);
  auto current = claim;
  for (const auto action : random_policy(claim, lexicon, n_edits_, seed_)) {
    record_step(rec, current, action, lexicon, scorer);
  }
  return rec;
}

RolloutRecord rollout(const DecisionTransformer& model, const lexedit::TokenizedClaim& claim,
                      const lexedit::Lexicon& lexicon, const searchenv::Scorer& scorer,
                      const RolloutOptions& options) {
  auto rec = start(claim, scorer);
  if (rec.original_reward >= kPerfect) return rec;
  const int K = model.config().block_size;
  double rtg = options.target_rtg.value_or(model.target_rtg);
  auto current = claim;
  std::vector<EncodedState> states{model.encoder().prepare(current.text())};
  DtSequence seq;
  for (int step = 0; step < K; ++step) {
    seq.steps.push_back(DtStep{rtg, step, 0});
    const RowVector logits =
        model.forward(std::span<const DtSequence>(&seq, 1), states).front().row(K - 1);
    int flat = -1;
    if (options.terminate_on_illegal) {
      Eigen::Index best = 0;
      logits.maxCoeff(&best);
      if (lexedit::is_legal(current, lexedit::unflatten_action(static_cast<int>(best)), lexicon)) {
        flat = static_cast<int>(best);
      }
    } else {
      flat = masked_argmax(logits, current, lexicon);
    }
    if (flat < 0) break;
    seq.steps.back().action = flat;
    rec.rtg_inputs.push_back(rtg);
    const double r = record_step(rec, current, lexedit::unflatten_action(flat), lexicon, scorer);
    rtg -= r;
    if (r >= kPerfect) break;
    states.push_back(model.encoder().prepare(current.text()));
  }
  return rec;
}

RolloutRecord ClassifierRewriter::rewrite(const lexedit::TokenizedClaim& claim,
                                          const lexedit::Lexicon& lexicon,
                                          const searchenv::Scorer& scorer) const {
  auto rec = start(claim, scorer);
  if (rec.original_reward >= kPerfect) return rec;
  auto current = claim;
  const int steps = iterated_ ? max_steps_ : 1;
  for (int step = 0; step < steps; ++step) {
    const int flat = masked_argmax(model_->logits(current.text()), current, lexicon);
    if (flat < 0) break;
    if (record_step(rec, current, lexedit::unflatten_action(flat), lexicon, scorer) >= kPerfect) {
      break;
    }
  }
  return rec;
}

}  // namespace claimforge::policy
