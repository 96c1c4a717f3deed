#include "claimforge/trajgen/stats.h"

#include <algorithm>
#include <map>

#include "claimforge/error.h"

namespace claimforge::trajgen {

DatasetStats dataset_stats(std::span<const Trajectory> trajectories,
                           std::optional<RewardMode> mode) {
  if (trajectories.empty()) throw Error(ErrorCode::kEmptyDataset, "no trajectories");
  if (!mode) {
    const bool any_dense = std::any_of(trajectories.begin(), trajectories.end(),
                                       [](const Trajectory& t) { return t.mode == RewardMode::kDense; });
    mode = any_dense ? RewardMode::kDense : RewardMode::kSparse;
  }
  DatasetStats s;
  s.mode = *mode;
  std::array<double, lexedit::kEditKinds> delta_sum{};
  std::array<std::size_t, lexedit::kEditKinds> delta_n{};
  std::map<std::string, double> best_gain;
  for (const auto& t : trajectories) {
    if (t.mode != *mode) continue;
    ++s.trajectories;
    s.steps += t.steps.size();
    std::optional<double> prev = t.original_reward;
    for (const auto& step : t.steps) {
      const auto kind = static_cast<std::size_t>(lexedit::unflatten_action(step.action).kind);
      ++s.per_kind[kind].count;
      if (prev) {
        delta_sum[kind] += step.reward - *prev;
        ++delta_n[kind];
      }
      prev = step.reward;
    }
    auto [it, fresh] = best_gain.try_emplace(t.claim_id, 0.0);
    if (t.original_reward && !t.steps.empty()) {
      const double g = t.steps.back().reward - *t.original_reward;
      it->second = fresh ? g : std::max(it->second, g);
    }
  }
  if (s.trajectories == 0) throw Error(ErrorCode::kEmptyDataset, "no trajectories of the requested mode");
  for (std::size_t k = 0; k < lexedit::kEditKinds; ++k) {
    s.per_kind[k].fraction = s.steps ? static_cast<double>(s.per_kind[k].count) / s.steps : 0.0;
    s.per_kind[k].mean_delta = delta_n[k] ? delta_sum[k] / delta_n[k] : 0.0;
  }
  s.claims = best_gain.size();
  double total = 0.0;
  for (const auto& [id, g] : best_gain) {
    total += g;
    if (g > 0.0) ++s.claims_improved;
  }
  s.mean_best_gain = total / static_cast<double>(s.claims);
  s.mean_length = static_cast<double>(s.steps) / static_cast<double>(s.trajectories);
  return s;
}

}  // namespace claimforge::trajgen
