#include "claimforge/searchenv/metrics.h"

#include <algorithm>
#include <string_view>

#include "claimforge/error.h"

namespace claimforge::searchenv {

namespace {

std::size_t cutoff(std::span<const std::string> ranking, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "metric cutoff k must be >= 1");
  return std::min(ranking.size(), static_cast<std::size_t>(k));
}

}  // namespace

// A document listed twice in a ranking counts once.

double ap_at_k(std::span<const std::string> ranking, const std::set<std::string>& relevant, int k) {
  const auto n = cutoff(ranking, k);
  if (relevant.empty()) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranking[i]) != 0 && seen.insert(ranking[i]).second) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  const auto denom = std::min(relevant.size(), static_cast<std::size_t>(k));
  return sum / static_cast<double>(denom);
}

double recall_at_k(std::span<const std::string> ranking, const std::set<std::string>& relevant,
                   int k) {
  const auto n = cutoff(ranking, k);
  if (relevant.empty()) return 0.0;
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranking[i]) != 0) seen.insert(ranking[i]);
  }
  return static_cast<double>(seen.size()) / static_cast<double>(relevant.size());
}

double reciprocal_rank(std::span<const std::string> ranking, const std::set<std::string>& relevant,
                       int k) {
  const auto n = cutoff(ranking, k);
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranking[i]) != 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

}  // namespace claimforge::searchenv
