#include "claimforge/searchenv/reward.h"

#include <vector>

#include "claimforge/error.h"
#include "claimforge/searchenv/metrics.h"

namespace claimforge::searchenv {

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::kAp: return "ap";
    case Metric::kRecall: return "recall";
    case Metric::kRr: return "rr";
  }
  return "ap";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  if (name == "ap") return Metric::kAp;
  if (name == "recall") return Metric::kRecall;
  if (name == "rr") return Metric::kRr;
  return std::nullopt;
}

double score_ranking(std::span<const std::string> ranking, const std::set<std::string>& relevant,
                     const RewardSpec& spec) {
  switch (spec.metric) {
    case Metric::kAp: return ap_at_k(ranking, relevant, spec.k);
    case Metric::kRecall: return recall_at_k(ranking, relevant, spec.k);
    case Metric::kRr: return reciprocal_rank(ranking, relevant, spec.k);
  }
  return 0.0;
}

double reward_text(const SearchEndpoint& endpoint, std::string_view claim_id,
                   std::string_view text, const RewardSpec& spec, const Corpus& corpus) {
  const auto* relevant = corpus.relevant(claim_id);
  if (relevant == nullptr) {
    throw Error(ErrorCode::kUnknownClaim, "no relevance judgments for claim '" +
                                              std::string(claim_id) + "'");
  }
  if (spec.k < 1) throw Error(ErrorCode::kInvalidArgument, "reward cutoff k must be >= 1");
  const auto hits = endpoint.query(text, static_cast<std::size_t>(spec.k));
  std::vector<std::string> ranking;
  ranking.reserve(hits.size());
  for (const auto& h : hits) ranking.push_back(h.doc_id);
  return score_ranking(ranking, *relevant, spec);
}

double reward(const SearchEndpoint& endpoint, const lexedit::TokenizedClaim& claim,
              const RewardSpec& spec, const Corpus& corpus) {
  return reward_text(endpoint, claim.claim_id(), claim.text(), spec, corpus);
}

}  // namespace claimforge::searchenv
