#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace claimforge::trajgen {

enum class RewardMode : std::uint8_t { kDense = 0, kSparse = 1 };

std::string_view reward_mode_name(RewardMode mode) noexcept;  // "dense" | "sparse"
std::optional<RewardMode> parse_reward_mode(std::string_view name) noexcept;

// One (R_t, S_t, A_t, r_t) tuple. `state` is the query text before the
// action; `reward` is the retrieval score after it.
struct Step {
  double rtg = 0.0;
  std::string state;
  int action = 0;
  double reward = 0.0;

  bool operator==(const Step&) const = default;
};

struct Trajectory {
  std::string claim_id;
  RewardMode mode = RewardMode::kDense;
  std::vector<Step> steps;
  double max_seen_reward = 0.0;
  // Reward of the unedited claim. Written as an extra field so per-step
  // deltas can be recovered from the file alone.
  std::optional<double> original_reward;

  bool operator==(const Trajectory&) const = default;
};

// Dense: R_t = sum_{t' >= t} r_t'. Sparse: zeros, last = max_seen.
std::vector<double> compute_rtg(std::span<const double> rewards, RewardMode mode,
                                double max_seen);

// JSONL, one trajectory per line. Reading throws Error(kParseError) with the
// 1-based line number on malformed input.
void write_trajectories(std::ostream& out, std::span<const Trajectory> trajectories);
std::vector<Trajectory> read_trajectories(std::istream& in);
void save_trajectories(const std::filesystem::path& path,
                       std::span<const Trajectory> trajectories);
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);

std::string to_json_line(const Trajectory& trajectory);
Trajectory parse_json_line(std::string_view line, std::size_t line_number = 0);

}  // namespace claimforge::trajgen
