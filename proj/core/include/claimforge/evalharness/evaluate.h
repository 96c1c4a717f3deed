#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "claimforge/lexedit/edit_action.h"
#include "claimforge/policy/rollout.h"
#include "claimforge/searchenv/reward.h"

namespace claimforge::evalharness {

struct EvalReport {
  std::string system;
  searchenv::BackendKind backend = searchenv::BackendKind::kBm25;
  searchenv::RewardSpec spec;
  double original_mean = 0.0;
  double rewritten_mean = 0.0;
  // (rewritten - original) / original; absent when original is 0.
  std::optional<double> relative_improvement;
  std::vector<policy::RolloutRecord> records;  // input order

  std::size_t n_claims() const noexcept { return records.size(); }
};

std::optional<double> relative_improvement(double original, double rewritten);

// Rewrites every claim and aggregates in input order, so the result does not
// depend on `threads`.
EvalReport evaluate(const policy::Rewriter& rewriter,
                    std::span<const lexedit::TokenizedClaim> claims,
                    const lexedit::Lexicon& lexicon, const searchenv::Scorer& scorer,
                    unsigned threads = 1);

enum class Segment : std::uint8_t { kImproved = 0, kSame = 1, kDecreased = 2 };
std::string_view segment_name(Segment s) noexcept;  // "improved" | "same" | "decreased"

struct StepCurveRow {
  Segment segment;
  int turn;  // 1 = original claim, t + 1 = after t edits
  std::size_t count;
  double mean;
};

struct StepCurve {
  std::vector<StepCurveRow> rows;  // by segment, then turn; empty cells omitted
  std::array<std::size_t, 3> records{};
  // "same" records whose scores never leave [begin - eps, begin + eps].
  std::size_t same_constant = 0;
  std::size_t same_varying = 0;
};

// Records are segmented by final vs original reward (exact comparison). A
// record with n edits contributes to turns 1..n+1 only.
StepCurve step_curve(std::span<const policy::RolloutRecord> records, double flat_epsilon = 0.01);

struct ActionRow {
  lexedit::EditKind kind;
  std::size_t improved = 0;
  std::size_t unchanged = 0;
  std::size_t decreased = 0;
  double mean_delta = 0.0;  // over steps with a non-zero delta
};

// Per action kind: outcome histogram over all steps, and the mean reward
// change over steps that changed the reward.
std::array<ActionRow, lexedit::kEditKinds> action_analysis(
    std::span<const policy::RolloutRecord> records);

}  // namespace claimforge::evalharness
