#include "claimforge/evalharness/pipeline.h"

#include <unordered_map>

#include <spdlog/spdlog.h>

#include "claimforge/error.h"
#include "claimforge/searchenv/endpoint.h"

namespace claimforge::evalharness {

PipelineResult run_pipeline(const ingest::Dataset& data, const lexedit::Lexicon& lexicon,
                            const PipelineConfig& config) {
  config.gen.validate();
  config.policy.validate();
  if (config.dev_claims == 0 || config.dev_claims >= data.claims.size()) {
    throw Error(ErrorCode::kInvalidArgument, "dev_claims must be in [1, " +
                                                 std::to_string(data.claims.size()) + ")");
  }
  const auto index = searchenv::build_index(data.corpus, config.backend);
  const searchenv::Scorer scorer(*index, data.corpus, config.spec);
  const auto claims = ingest::tokenize_claims(data.claims, lexicon);
  const std::size_t n_train = claims.size() - config.dev_claims;
  const std::span<const lexedit::TokenizedClaim> train(claims.data(), n_train);
  const std::span<const lexedit::TokenizedClaim> dev(claims.data() + n_train, config.dev_claims);

  PipelineResult result;
  result.train_claims = n_train;
  const auto gen = trajgen::generate_dataset(train, lexicon, scorer, config.gen, config.threads);
  std::vector<trajgen::Trajectory> trajectories;
  const trajgen::RewardMode modes[] = {config.rtg_mode};
  for (const auto& g : gen) {
    auto t = trajgen::to_trajectories(g, modes);
    trajectories.insert(trajectories.end(), std::make_move_iterator(t.begin()),
                        std::make_move_iterator(t.end()));
  }
  result.trajectories = trajectories.size();
  spdlog::info("pipeline {} / {}: {} trajectories from {} claims",
               searchenv::backend_name(config.backend), searchenv::metric_name(config.spec.metric),
               trajectories.size(), n_train);

  auto dt = policy::train_decision_transformer(trajectories, config.policy);
  result.dt_train = dt.report;

  result.claim = evaluate(policy::IdentityRewriter{}, dev, lexicon, scorer, config.threads);
  result.random = evaluate(policy::RandomRewriter(config.policy.block_size, config.random_seed), dev,
                           lexicon, scorer, config.threads);
  result.dt = evaluate(policy::DtRewriter(dt.model, {}), dev, lexicon, scorer, config.threads);

  if (config.train_classifier) {
    auto cls = policy::train_classifier(trajectories, config.policy);
    result.classifier_train = cls.report;
    result.classifier_once = evaluate(policy::ClassifierRewriter(cls.model, false, config.policy.block_size),
                                      dev, lexicon, scorer, config.threads);
    result.classifier_iterated =
        evaluate(policy::ClassifierRewriter(cls.model, true, config.policy.block_size), dev, lexicon,
                 scorer, config.threads);
  }
  return result;
}

double headroom_recovery(const EvalReport& report,
                         const std::vector<ingest::AnswerKeyEntry>& answer_key) {
  std::unordered_map<std::string_view, const ingest::AnswerKeyEntry*> by_id;
  for (const auto& e : answer_key) by_id.emplace(e.claim_id, &e);
  double gained = 0.0;
  double headroom = 0.0;
  for (const auto& r : report.records) {
    const auto it = by_id.find(r.claim_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kDanglingReference, "no answer-key entry for claim " + r.claim_id);
    }
    gained += r.final_reward() - r.original_reward;
    headroom += it->second->best_reward - r.original_reward;
  }
  return headroom > 0.0 ? gained / headroom : 0.0;
}

AblationMatrix run_ablation(const ingest::Dataset& data, const lexedit::Lexicon& lexicon,
                            const AblationGrid& grid, const PipelineConfig& base) {
  std::map<AblationKey, EvalReport> reports;
  for (const auto& key : grid.cells()) {
    PipelineConfig cfg = base;
    cfg.backend = key.backend;
    cfg.spec.metric = key.metric;
    cfg.gen.include_negative = key.include_negative;
    cfg.train_classifier = false;
    auto result = run_pipeline(data, lexicon, cfg);
    reports.emplace(key, std::move(result.dt));
  }
  return ablation_matrix(grid, reports);
}

}  // namespace claimforge::evalharness
