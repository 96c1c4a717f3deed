#include "claimforge/trajgen/trajectory.h"

#include <fstream>
#include <json.hpp>

#include "claimforge/error.h"
#include "claimforge/lexedit/edit_action.h"

namespace claimforge::trajgen {

using nlohmann::json;

std::string_view reward_mode_name(RewardMode mode) noexcept {
  return mode == RewardMode::kDense ? "dense" : "sparse";
}

std::optional<RewardMode> parse_reward_mode(std::string_view name) noexcept {
  if (name == "dense") return RewardMode::kDense;
  if (name == "sparse") return RewardMode::kSparse;
  return std::nullopt;
}

std::vector<double> compute_rtg(std::span<const double> rewards, RewardMode mode,
                                double max_seen) {
  std::vector<double> rtg(rewards.size(), 0.0);
  if (rewards.empty()) return rtg;
  if (mode == RewardMode::kSparse) {
    rtg.back() = max_seen;
    return rtg;
  }
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc += rewards[i];
    rtg[i] = acc;
  }
  return rtg;
}

std::string to_json_line(const Trajectory& t) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"rtg", s.rtg}, {"state", s.state}, {"action", s.action}, {"reward", s.reward}});
  }
  nlohmann::ordered_json j = {{"claim_id", t.claim_id},
                              {"mode", reward_mode_name(t.mode)},
                              {"steps", std::move(steps)},
                              {"max_seen_reward", t.max_seen_reward}};
  if (t.original_reward) j["original_reward"] = *t.original_reward;
  return j.dump();
}

Trajectory parse_json_line(std::string_view line, std::size_t line_number) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::kParseError, "trajectory line " + std::to_string(line_number) + ": " + why,
                 line_number);
  };
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw fail(e.what());
  }
  try {
    Trajectory t;
    t.claim_id = j.at("claim_id").get<std::string>();
    const auto mode = parse_reward_mode(j.at("mode").get<std::string>());
    if (!mode) throw fail("mode must be \"dense\" or \"sparse\"");
    t.mode = *mode;
    t.max_seen_reward = j.at("max_seen_reward").get<double>();
    if (j.contains("original_reward")) t.original_reward = j["original_reward"].get<double>();
    for (const auto& s : j.at("steps")) {
      Step step;
      step.rtg = s.at("rtg").get<double>();
      step.state = s.at("state").get<std::string>();
      step.action = s.at("action").get<int>();
      step.reward = s.at("reward").get<double>();
      if (step.action < 0 || step.action >= lexedit::kActionSpaceSize) {
        throw fail("action " + std::to_string(step.action) + " outside [0, 128)");
      }
      t.steps.push_back(std::move(step));
    }
    if (t.steps.empty()) throw fail("trajectory has no steps");
    return t;
  } catch (const json::exception& e) {
    throw fail(e.what());
  }
}

void write_trajectories(std::ostream& out, std::span<const Trajectory> trajectories) {
  for (const auto& t : trajectories) out << to_json_line(t) << '\n';
}

std::vector<Trajectory> read_trajectories(std::istream& in) {
  std::vector<Trajectory> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(line, n));
  }
  return out;
}

void save_trajectories(const std::filesystem::path& path,
                       std::span<const Trajectory> trajectories) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_trajectories(out, trajectories);
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_trajectories(in);
}

}  // namespace claimforge::trajgen
