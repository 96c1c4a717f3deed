#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "claimforge/lexedit/lexicon.h"
#include "claimforge/lexedit/tokenized_claim.h"
#include "claimforge/searchenv/reward.h"
#include "claimforge/trajgen/trajectory.h"

namespace claimforge::trajgen {

struct GenConfig {
  int max_depth = 4;
  double min_improvement = 0.03;
  double random_prune_prob = 0.05;
  int top_n_sequences = 50;
  bool include_negative = false;
  std::uint64_t seed = 0;
  // Per-level frontier cap, best cumulative reward first. 0 = unbounded.
  std::size_t max_frontier = 0;

  // Throws Error(kInvalidArgument).
  void validate() const;
};

using RewardFn = std::function<double(const lexedit::TokenizedClaim&)>;

struct EditPath {
  std::vector<int> actions;           // flat ids
  std::vector<std::string> states;    // text before each action
  std::vector<double> rewards;        // reward after each action
  double final_reward() const { return rewards.back(); }
};

enum class GenOutcome : std::uint8_t { kGenerated, kAlreadyPerfect, kNoImprovementFound };

std::string_view gen_outcome_name(GenOutcome outcome) noexcept;

struct GenResult {
  std::string claim_id;
  GenOutcome outcome = GenOutcome::kNoImprovementFound;
  double original_reward = 0.0;
  double max_seen_reward = 0.0;
  std::vector<EditPath> paths;  // ranked, at most top_n_sequences
  std::size_t nodes_evaluated = 0;
};

// Breadth-first search over edit sequences:
//  - a child is kept when its reward beats the parent's (any change when
//    include_negative) by a relative margin of at least min_improvement,
//    measured as (child - parent) / max(parent, 1e-6);
//  - kept children then survive a seeded coin flip with prob 1 - random_prune_prob;
//  - states reached twice at the same depth keep the path with the larger
//    reward sum, then the lexicographically smaller action sequence.
// Every kept node is a candidate sequence. Candidates must end above the
// original reward (or anywhere but on it, with include_negative) and are
// ranked by gain (|gain| with include_negative) descending, then length,
// then action sequence.
GenResult search_paths(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon,
                       const RewardFn& reward, const GenConfig& cfg);

std::vector<Trajectory> to_trajectories(const GenResult& result,
                                        std::span<const RewardMode> modes);

std::vector<Trajectory> generate_trajectories(const lexedit::TokenizedClaim& claim,
                                              const lexedit::Lexicon& lexicon,
                                              const searchenv::Scorer& scorer,
                                              const GenConfig& cfg,
                                              std::span<const RewardMode> modes);

// Runs search_paths over many claims on `threads` workers. Results keep the
// input order.
std::vector<GenResult> generate_dataset(std::span<const lexedit::TokenizedClaim> claims,
                                        const lexedit::Lexicon& lexicon,
                                        const searchenv::Scorer& scorer, const GenConfig& cfg,
                                        unsigned threads = 1);

// Uniform in [0, 1), a pure function of (seed, claim_id, actions).
double prune_draw(std::uint64_t seed, std::string_view claim_id, std::span<const int> actions);

}  // namespace claimforge::trajgen
