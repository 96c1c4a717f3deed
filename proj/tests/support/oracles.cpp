#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "claimforge/lexedit/editor.h"

namespace claimforge::testing {

namespace {

std::size_t relevant_in_prefix(const std::vector<std::string>& ranking,
                               const std::set<std::string>& relevant, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n && i < ranking.size(); ++i) c += relevant.count(ranking[i]);
  return c;
}

}  // namespace

double oracle_ap(const std::vector<std::string>& ranking, const std::set<std::string>& relevant, int k) {
  if (relevant.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i <= static_cast<std::size_t>(k) && i <= ranking.size(); ++i) {
    if (!relevant.count(ranking[i - 1])) continue;
    total += static_cast<double>(relevant_in_prefix(ranking, relevant, i)) / static_cast<double>(i);
  }
  return total / static_cast<double>(std::min<std::size_t>(relevant.size(), static_cast<std::size_t>(k)));
}

double oracle_recall(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                     int k) {
  if (relevant.empty()) return 0.0;
  std::set<std::string> top(ranking.begin(),
                            ranking.begin() + std::min<std::ptrdiff_t>(k, std::ssize(ranking)));
  std::size_t both = 0;
  for (const auto& r : relevant) both += top.count(r);
  return static_cast<double>(both) / static_cast<double>(relevant.size());
}

double oracle_rr(const std::vector<std::string>& ranking, const std::set<std::string>& relevant, int k) {
  for (int i = 1; i <= k && i <= static_cast<int>(ranking.size()); ++i) {
    if (relevant_in_prefix(ranking, relevant, static_cast<std::size_t>(i)) > 0) return 1.0 / i;
  }
  return 0.0;
}

std::vector<std::pair<std::string, double>> oracle_bm25(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& docs,
    const std::vector<std::string>& query_terms, double k1, double b) {
  const double n = static_cast<double>(docs.size());
  double total_len = 0.0;
  for (const auto& d : docs) total_len += static_cast<double>(d.second.size());
  const double avgdl = total_len / n;
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [id, terms] : docs) {
    double score = 0.0;
    bool hit = false;
    for (const auto& q : query_terms) {
      const double tf = static_cast<double>(std::count(terms.begin(), terms.end(), q));
      if (tf == 0.0) continue;
      hit = true;
      double df = 0.0;
      for (const auto& other : docs) {
        if (std::find(other.second.begin(), other.second.end(), q) != other.second.end()) df += 1.0;
      }
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double len = static_cast<double>(terms.size());
      score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avgdl));
    }
    if (hit) out.emplace_back(id, score);
  }
  return out;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  return dot / std::sqrt(na * nb);
}

std::vector<std::size_t> oracle_knn(const std::vector<std::vector<float>>& vectors,
                                    const std::vector<float>& query, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < vectors.size(); ++i) all.emplace_back(-cosine(vectors[i], query), i);
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k && i < all.size(); ++i) out.push_back(all[i].second);
  return out;
}

namespace {

struct Best {
  double sum;
  OraclePath path;
};

struct Enumerator {
  const lexedit::Lexicon& lexicon;
  const OracleReward& reward;
  int depth;
  double min_improvement;
  std::map<std::pair<int, std::string>, Best> best;

  void visit(const lexedit::TokenizedClaim& state, double state_reward, double sum, OraclePath& path) {
    const int d = static_cast<int>(path.actions.size());
    if (d == depth || state_reward >= 1.0 - 1e-12) return;
    for (int flat = 0; flat < 128; ++flat) {
      const auto action = lexedit::unflatten_action(flat);
      if (!lexedit::is_legal(state, action, lexicon)) continue;
      const auto child = lexedit::apply_action(state, action, lexicon);
      const double r = reward(child);
      if (!(r > state_reward)) continue;
      if ((r - state_reward) / std::max(state_reward, 1e-6) < min_improvement) continue;
      path.actions.push_back(flat);
      path.states.push_back(state.text());
      path.rewards.push_back(r);
      const double child_sum = sum + r;
      const auto key = std::make_pair(d + 1, child.text());
      const auto it = best.find(key);
      if (it == best.end() || child_sum > it->second.sum ||
          (child_sum == it->second.sum && path.actions < it->second.path.actions)) {
        best[key] = Best{child_sum, path};
      }
      visit(child, r, child_sum, path);
      path.actions.pop_back();
      path.states.pop_back();
      path.rewards.pop_back();
    }
  }
};

}  // namespace

std::vector<OraclePath> oracle_improving_paths(const lexedit::TokenizedClaim& claim,
                                               const lexedit::Lexicon& lexicon,
                                               const OracleReward& reward, int depth,
                                               double min_improvement, std::size_t top_n) {
  const double r0 = reward(claim);
  Enumerator e{lexicon, reward, depth, min_improvement, {}};
  OraclePath path;
  e.visit(claim, r0, 0.0, path);
  std::vector<OraclePath> out;
  for (auto& [_, b] : e.best) out.push_back(std::move(b.path));
  std::sort(out.begin(), out.end(), [r0](const OraclePath& a, const OraclePath& b) {
    const double ga = a.rewards.back() - r0;
    const double gb = b.rewards.back() - r0;
    if (ga != gb) return ga > gb;
    if (a.actions.size() != b.actions.size()) return a.actions.size() < b.actions.size();
    return a.actions < b.actions;
  });
  if (out.size() > top_n) out.erase(out.begin() + static_cast<std::ptrdiff_t>(top_n), out.end());
  return out;
}

double oracle_best_reward(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon,
                          const OracleReward& reward, int depth) {
  double best = reward(claim);
  if (depth == 0) return best;
  for (const auto action : lexedit::legal_actions(claim, lexicon)) {
    best = std::max(best, oracle_best_reward(lexedit::apply_action(claim, action, lexicon), lexicon,
                                             reward, depth - 1));
    if (best >= 1.0) break;
  }
  return best;
}

}  // namespace claimforge::testing
