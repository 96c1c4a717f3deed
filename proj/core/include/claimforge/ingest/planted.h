#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "claimforge/ingest/dataset.h"
#include "claimforge/lexedit/lexicon.h"
#include "claimforge/searchenv/reward.h"

namespace claimforge::ingest {

struct PlantedConfig {
  std::size_t n_claims = 500;
  std::uint64_t seed = 7;
  std::size_t background_docs = 2000;
  int min_corruptions = 1;
  int max_corruptions = 3;
  // Adds a second relevant document per claim (see make_planted_benchmark).
  bool evidence_docs = false;
  // Answer key: BM25 + this reward, exhaustive search to this depth.
  bool answer_key = true;
  int answer_depth = 4;
  searchenv::RewardSpec answer_spec;
  unsigned threads = 1;
};

struct AnswerKeyEntry {
  std::string claim_id;
  double original_reward = 0.0;
  double best_reward = 0.0;
  std::vector<int> best_actions;  // shortest, then lexicographically smallest

  bool operator==(const AnswerKeyEntry&) const = default;
};

struct PlantedBenchmark {
  Dataset data;
  lexedit::Lexicon lexicon;
  std::vector<AnswerKeyEntry> answer_key;
};

// Synthetic corpus over a pseudo-word vocabulary. Each claim is a clean
// sentence (its only relevant document) corrupted by 1-3 of: an inserted
// distractor word, a verb in past tense, a word swapped for its synonym.
// Per claim the corpus also holds two confuser documents per corruption
// (sentence minus one content word, plus the corruption token) and one
// near-miss document per content word (sentence minus that word), so
// undoing corruptions raises the relevant document while deleting content
// words lowers it. With `evidence_docs`, each claim also gets a second
// relevant document "<id>-e" holding the clean forms of its tense and
// synonym corruptions, one intact content word and unrelated filler; it
// sits below the top 50 until those corruptions are undone, which gives
// Recall@50 headroom. Output is a pure function of the config.
PlantedBenchmark make_planted_benchmark(const PlantedConfig& config);

using StateReward = std::function<double(const lexedit::TokenizedClaim&)>;

// Best reward over every state reachable within `depth` legal edits
// (distinct-state BFS, no pruning, stops early at reward 1).
AnswerKeyEntry exhaustive_best(const lexedit::TokenizedClaim& claim,
                               const lexedit::Lexicon& lexicon, const StateReward& reward,
                               int depth);

std::vector<AnswerKeyEntry> compute_answer_key(std::span<const lexedit::TokenizedClaim> claims,
                                               const lexedit::Lexicon& lexicon,
                                               const searchenv::Scorer& scorer, int depth,
                                               unsigned threads = 1);

void save_answer_key(const std::filesystem::path& path, std::span<const AnswerKeyEntry> key);
std::vector<AnswerKeyEntry> load_answer_key(const std::filesystem::path& path);

// Writes corpus.jsonl, claims.jsonl, answer_key.jsonl and lexicon/. When
// `dev_claims` > 0 the last that many claims also go to claims_dev.jsonl
// and the rest to claims_train.jsonl.
void write_planted_benchmark(const std::filesystem::path& dir, const PlantedBenchmark& bench,
                             std::size_t dev_claims = 0);

}  // namespace claimforge::ingest
