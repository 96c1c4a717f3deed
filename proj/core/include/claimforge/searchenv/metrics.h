#pragma once

#include <set>
#include <span>
#include <string>

namespace claimforge::searchenv {

// All three return values in [0, 1] and 0 for an empty relevant set.
// Throw Error(kInvalidArgument) when k < 1.

// Sum of precision@i over relevant hits at rank i <= k, divided by
// min(|relevant|, k).
double ap_at_k(std::span<const std::string> ranking, const std::set<std::string>& relevant, int k);

double recall_at_k(std::span<const std::string> ranking, const std::set<std::string>& relevant,
                   int k);

// 1 / rank of the first relevant hit within the top k, else 0.
double reciprocal_rank(std::span<const std::string> ranking, const std::set<std::string>& relevant,
                       int k);

}  // namespace claimforge::searchenv
