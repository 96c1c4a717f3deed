#include "claimforge/evalharness/evaluate.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace claimforge::evalharness {

std::optional<double> relative_improvement(double original, double rewritten) {
  if (original > 0.0) return (rewritten - original) / original;
  return std::nullopt;
}

EvalReport evaluate(const policy::Rewriter& rewriter,
                    std::span<const lexedit::TokenizedClaim> claims,
                    const lexedit::Lexicon& lexicon, const searchenv::Scorer& scorer,
                    unsigned threads) {
  EvalReport report;
  report.system = rewriter.name();
  report.backend = scorer.backend();
  report.spec = scorer.spec();
  report.records.resize(claims.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < claims.size(); i = next++) {
      try {
        report.records[i] = rewriter.rewrite(claims[i], lexicon, scorer);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = claims.size();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, claims.size()))));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  double orig = 0.0;
  double rewritten = 0.0;
  for (const auto& r : report.records) {
    orig += r.original_reward;
    rewritten += r.final_reward();
  }
  if (!report.records.empty()) {
    report.original_mean = orig / static_cast<double>(report.records.size());
    report.rewritten_mean = rewritten / static_cast<double>(report.records.size());
  }
  report.relative_improvement = relative_improvement(report.original_mean, report.rewritten_mean);
  return report;
}

std::string_view segment_name(Segment s) noexcept {
  switch (s) {
    case Segment::kImproved: return "improved";
    case Segment::kSame: return "same";
    case Segment::kDecreased: return "decreased";
  }
  return "same";
}

StepCurve step_curve(std::span<const policy::RolloutRecord> records, double flat_epsilon) {
  StepCurve curve;
  std::array<std::vector<double>, 3> sums;
  std::array<std::vector<std::size_t>, 3> counts;
  for (const auto& r : records) {
    const double begin = r.original_reward;
    const double end = r.final_reward();
    const auto seg = end > begin ? Segment::kImproved : end < begin ? Segment::kDecreased : Segment::kSame;
    const auto si = static_cast<std::size_t>(seg);
    ++curve.records[si];
    if (seg == Segment::kSame) {
      const bool flat = std::all_of(r.rewards.begin(), r.rewards.end(), [&](double x) {
        return std::abs(x - begin) <= flat_epsilon;
      });
      ++(flat ? curve.same_constant : curve.same_varying);
    }
    const std::size_t turns = r.rewards.size() + 1;
    if (sums[si].size() < turns) {
      sums[si].resize(turns, 0.0);
      counts[si].resize(turns, 0);
    }
    for (std::size_t t = 0; t < turns; ++t) {
      sums[si][t] += t == 0 ? begin : r.rewards[t - 1];
      ++counts[si][t];
    }
  }
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t t = 0; t < sums[s].size(); ++t) {
      if (counts[s][t] == 0) continue;
      curve.rows.push_back(StepCurveRow{static_cast<Segment>(s), static_cast<int>(t + 1), counts[s][t],
                                        sums[s][t] / static_cast<double>(counts[s][t])});
    }
  }
  return curve;
}

std::array<ActionRow, lexedit::kEditKinds> action_analysis(
    std::span<const policy::RolloutRecord> records) {
  std::array<ActionRow, lexedit::kEditKinds> rows;
  std::array<double, lexedit::kEditKinds> sum{};
  std::array<std::size_t, lexedit::kEditKinds> nonzero{};
  for (int k = 0; k < lexedit::kEditKinds; ++k) rows[k].kind = static_cast<lexedit::EditKind>(k);
  for (const auto& r : records) {
    double prev = r.original_reward;
    for (std::size_t i = 0; i < r.actions.size(); ++i) {
      const auto k = static_cast<std::size_t>(lexedit::unflatten_action(r.actions[i]).kind);
      const double delta = r.rewards[i] - prev;
      prev = r.rewards[i];
      if (delta > 0.0) {
        ++rows[k].improved;
      } else if (delta < 0.0) {
        ++rows[k].decreased;
      } else {
        ++rows[k].unchanged;
        continue;
      }
      sum[k] += delta;
      ++nonzero[k];
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].mean_delta = nonzero[k] ? sum[k] / static_cast<double>(nonzero[k]) : 0.0;
  }
  return rows;
}

}  // namespace claimforge::evalharness
