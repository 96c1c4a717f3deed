#pragma once

#include <optional>
#include <string>
#include <vector>

#include "claimforge/evalharness/ablation.h"
#include "claimforge/evalharness/evaluate.h"
#include "claimforge/ingest/planted.h"
#include "claimforge/policy/config.h"
#include "claimforge/policy/trainer.h"
#include "claimforge/trajgen/generator.h"

namespace claimforge::evalharness {

struct PipelineConfig {
  searchenv::BackendKind backend = searchenv::BackendKind::kBm25;
  searchenv::RewardSpec spec;
  trajgen::GenConfig gen;
  trajgen::RewardMode rtg_mode = trajgen::RewardMode::kDense;
  policy::PolicyConfig policy;
  bool train_classifier = true;
  std::uint64_t random_seed = 1;
  std::size_t dev_claims = 100;  // last claims of the dataset
  unsigned threads = 1;
};

struct PipelineResult {
  std::size_t train_claims = 0;
  std::size_t trajectories = 0;
  policy::TrainReport dt_train;
  std::optional<policy::TrainReport> classifier_train;
  EvalReport claim;
  EvalReport random;
  EvalReport dt;
  std::optional<EvalReport> classifier_once;
  std::optional<EvalReport> classifier_iterated;
};

// Generate trajectories on the training claims, train, and evaluate the
// claim / random / DT / classifier systems on the dev claims.
PipelineResult run_pipeline(const ingest::Dataset& data, const lexedit::Lexicon& lexicon,
                            const PipelineConfig& config);

// Fraction of the answer-key headroom (best - original) a system recovers
// on average over `records`; claims are matched by id.
double headroom_recovery(const EvalReport& report,
                         const std::vector<ingest::AnswerKeyEntry>& answer_key);

// Runs the pipeline once per grid cell (backend x metric x negatives) and
// assembles the matrix.
AblationMatrix run_ablation(const ingest::Dataset& data, const lexedit::Lexicon& lexicon,
                            const AblationGrid& grid, const PipelineConfig& base);

}  // namespace claimforge::evalharness
