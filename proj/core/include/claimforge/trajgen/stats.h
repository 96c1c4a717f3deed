#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "claimforge/lexedit/edit_action.h"
#include "claimforge/trajgen/trajectory.h"

namespace claimforge::trajgen {

struct ActionKindStats {
  std::size_t count = 0;
  double fraction = 0.0;    // of all steps
  double mean_delta = 0.0;  // reward change caused by the step
};

struct DatasetStats {
  RewardMode mode = RewardMode::kDense;
  std::size_t trajectories = 0;
  std::size_t steps = 0;
  std::size_t claims = 0;
  std::size_t claims_improved = 0;
  double mean_best_gain = 0.0;  // over claims
  double mean_length = 0.0;
  std::array<ActionKindStats, lexedit::kEditKinds> per_kind{};
};

// Uses trajectories of `mode` only (dense when present, when unset). Deltas
// of first steps need original_reward; steps without it are counted but
// left out of the mean. Throws Error(kEmptyDataset).
DatasetStats dataset_stats(std::span<const Trajectory> trajectories,
                           std::optional<RewardMode> mode = std::nullopt);

}  // namespace claimforge::trajgen
