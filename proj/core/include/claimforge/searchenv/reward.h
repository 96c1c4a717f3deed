#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "claimforge/lexedit/tokenized_claim.h"
#include "claimforge/searchenv/corpus.h"
#include "claimforge/searchenv/endpoint.h"

namespace claimforge::searchenv {

enum class Metric : std::uint8_t { kAp = 0, kRecall = 1, kRr = 2 };

std::string_view metric_name(Metric metric) noexcept;  // "ap" | "recall" | "rr"
std::optional<Metric> parse_metric(std::string_view name) noexcept;

// Which retrieval metric defines the scalar reward, and at what cutoff.
struct RewardSpec {
  Metric metric = Metric::kAp;
  int k = 50;
};

double score_ranking(std::span<const std::string> ranking, const std::set<std::string>& relevant,
                     const RewardSpec& spec);

// Queries the endpoint with the claim text and scores the top spec.k.
// Throws Error(kUnknownClaim) when the corpus has no judgments for the claim.
double reward(const SearchEndpoint& endpoint, const lexedit::TokenizedClaim& claim,
              const RewardSpec& spec, const Corpus& corpus);

double reward_text(const SearchEndpoint& endpoint, std::string_view claim_id,
                   std::string_view text, const RewardSpec& spec, const Corpus& corpus);

// Endpoint + judgments + reward definition bundled as a callable. This is
// the only surface through which generation and policies see retrieval.
class Scorer {
 public:
  Scorer(const SearchEndpoint& endpoint, const Corpus& corpus, RewardSpec spec)
      : endpoint_(&endpoint), corpus_(&corpus), spec_(spec) {}

  double operator()(const lexedit::TokenizedClaim& claim) const {
    return reward(*endpoint_, claim, spec_, *corpus_);
  }
  double score_text(std::string_view claim_id, std::string_view text) const {
    return reward_text(*endpoint_, claim_id, text, spec_, *corpus_);
  }

  const RewardSpec& spec() const noexcept { return spec_; }
  BackendKind backend() const noexcept { return endpoint_->backend(); }

 private:
  const SearchEndpoint* endpoint_;
  const Corpus* corpus_;
  RewardSpec spec_;
};

}  // namespace claimforge::searchenv
