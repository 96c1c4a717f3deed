#include "claimforge/trajgen/generator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "claimforge/error.h"
#include "claimforge/lexedit/editor.h"

namespace claimforge::trajgen {

namespace {

constexpr double kRelativeEps = 1e-6;
constexpr double kPerfect = 1.0 - 1e-12;

struct Node {
  lexedit::TokenizedClaim claim;
  EditPath path;
  double reward = 0.0;
  double sum = 0.0;
};

bool preferred(const Node& a, const Node& b) {
  if (a.sum != b.sum) return a.sum > b.sum;
  return a.path.actions < b.path.actions;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

}  // namespace

std::string_view gen_outcome_name(GenOutcome outcome) noexcept {
  switch (outcome) {
    case GenOutcome::kGenerated: return "generated";
    case GenOutcome::kAlreadyPerfect: return "already_perfect";
    case GenOutcome::kNoImprovementFound: return "no_improvement_found";
  }
  return "generated";
}

void GenConfig::validate() const {
  if (max_depth < 1) throw Error(ErrorCode::kInvalidArgument, "max_depth must be >= 1");
  if (!(random_prune_prob >= 0.0 && random_prune_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "random_prune_prob must be in [0, 1)");
  }
  if (top_n_sequences < 1) throw Error(ErrorCode::kInvalidArgument, "top_n_sequences must be >= 1");
  if (!(min_improvement >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_improvement must be >= 0");
  }
}

double prune_draw(std::uint64_t seed, std::string_view claim_id, std::span<const int> actions) {
  std::uint64_t h = mix(0x636c61696d666f72ULL, seed);
  for (unsigned char c : claim_id) h = mix(h, c);
  h = mix(h, 0xffULL);
  for (int a : actions) h = mix(h, static_cast<std::uint64_t>(a) + 1);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

GenResult search_paths(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon,
                       const RewardFn& reward, const GenConfig& cfg) {
  cfg.validate();
  GenResult result;
  result.claim_id = claim.claim_id();

  std::unordered_map<std::string, double> memo;
  auto score = [&](const lexedit::TokenizedClaim& c) {
    auto text = c.text();
    if (auto it = memo.find(text); it != memo.end()) return it->second;
    const double r = reward(c);
    ++result.nodes_evaluated;
    memo.emplace(std::move(text), r);
    return r;
  };

  const double r0 = score(claim);
  result.original_reward = r0;
  result.max_seen_reward = r0;
  if (r0 >= kPerfect) {
    result.outcome = GenOutcome::kAlreadyPerfect;
    return result;
  }

  std::vector<Node> frontier;
  frontier.push_back(Node{claim, {}, r0, 0.0});
  std::vector<Node> candidates;

  for (int depth = 1; depth <= cfg.max_depth && !frontier.empty(); ++depth) {
    std::unordered_map<std::string, std::size_t> slot;
    std::vector<Node> level;
    for (const auto& parent : frontier) {
      if (parent.reward >= kPerfect) continue;
      const auto parent_text = parent.claim.text();
      for (const auto action : lexedit::legal_actions(parent.claim, lexicon)) {
        auto child_claim = lexedit::apply_action(parent.claim, action, lexicon);
        const double r = score(child_claim);
        result.max_seen_reward = std::max(result.max_seen_reward, r);
        const double rel = (r - parent.reward) / std::max(parent.reward, kRelativeEps);
        const bool keep = cfg.include_negative
                              ? (r != parent.reward && std::abs(rel) >= cfg.min_improvement)
                              : (r > parent.reward && rel >= cfg.min_improvement);
        if (!keep) continue;

        Node child{std::move(child_claim), parent.path, r, parent.sum + r};
        child.path.actions.push_back(lexedit::flatten_action(action));
        child.path.states.push_back(parent_text);
        child.path.rewards.push_back(r);
        if (cfg.random_prune_prob > 0.0 &&
            prune_draw(cfg.seed, result.claim_id, child.path.actions) < cfg.random_prune_prob) {
          continue;
        }

        auto key = child.claim.text();
        if (auto it = slot.find(key); it != slot.end()) {
          if (preferred(child, level[it->second])) level[it->second] = std::move(child);
        } else {
          slot.emplace(std::move(key), level.size());
          level.push_back(std::move(child));
        }
      }
    }
    std::sort(level.begin(), level.end(), preferred);
    if (cfg.max_frontier > 0 && level.size() > cfg.max_frontier) level.erase(level.begin() + static_cast<std::ptrdiff_t>(cfg.max_frontier), level.end());
    for (const auto& n : level) candidates.push_back(n);
    frontier = std::move(level);
  }

  std::erase_if(candidates, [&](const Node& n) {
    return cfg.include_negative ? n.reward == r0 : n.reward <= r0;
  });
  auto gain = [&](const Node& n) {
    return cfg.include_negative ? std::abs(n.reward - r0) : n.reward - r0;
  };
  std::sort(candidates.begin(), candidates.end(), [&](const Node& a, const Node& b) {
    const double ga = gain(a);
    const double gb = gain(b);
    if (ga != gb) return ga > gb;
    if (a.path.actions.size() != b.path.actions.size()) {
      return a.path.actions.size() < b.path.actions.size();
    }
    return a.path.actions < b.path.actions;
  });
  if (candidates.size() > static_cast<std::size_t>(cfg.top_n_sequences)) {
    candidates.erase(candidates.begin() + cfg.top_n_sequences, candidates.end());
  }
  result.paths.reserve(candidates.size());
  for (auto& n : candidates) result.paths.push_back(std::move(n.path));
  result.outcome = result.paths.empty() ? GenOutcome::kNoImprovementFound : GenOutcome::kGenerated;
  return result;
}

std::vector<Trajectory> to_trajectories(const GenResult& result,
                                        std::span<const RewardMode> modes) {
  std::vector<Trajectory> out;
  for (const auto& path : result.paths) {
    for (const auto mode : modes) {
      Trajectory t;
      t.claim_id = result.claim_id;
      t.mode = mode;
      t.max_seen_reward = result.max_seen_reward;
      t.original_reward = result.original_reward;
      const auto rtg = compute_rtg(path.rewards, mode, result.max_seen_reward);
      for (std::size_t i = 0; i < path.actions.size(); ++i) {
        t.steps.push_back(Step{rtg[i], path.states[i], path.actions[i], path.rewards[i]});
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<Trajectory> generate_trajectories(const lexedit::TokenizedClaim& claim,
                                              const lexedit::Lexicon& lexicon,
                                              const searchenv::Scorer& scorer,
                                              const GenConfig& cfg,
                                              std::span<const RewardMode> modes) {
  return to_trajectories(search_paths(claim, lexicon, scorer, cfg), modes);
}

std::vector<GenResult> generate_dataset(std::span<const lexedit::TokenizedClaim> claims,
                                        const lexedit::Lexicon& lexicon,
                                        const searchenv::Scorer& scorer, const GenConfig& cfg,
                                        unsigned threads) {
  cfg.validate();
  std::vector<GenResult> results(claims.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < claims.size(); i = next++) {
      try {
        results[i] = search_paths(claims[i], lexicon, scorer, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = claims.size();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(claims.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace claimforge::trajgen
