#include "claimforge/policy/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <spdlog/spdlog.h>
#include <string>
#include <unordered_map>

#include "claimforge/error.h"
#include "claimforge/lexedit/edit_action.h"

namespace claimforge::policy {

Adam::Adam(std::vector<Param*> params, double learning_rate, double grad_clip)
    : params_(std::move(params)), lr_(learning_rate), clip_(grad_clip) {
  for (const auto* p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

double Adam::step() {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  double sq = 0.0;
  for (const auto* p : params_) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  const double scale = (clip_ > 0.0 && norm > clip_) ? clip_ / norm : 1.0;
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = *params_[i];
    const auto g = p.grad.array() * scale;
    m_[i].array() = kBeta1 * m_[i].array() + (1.0 - kBeta1) * g;
    v_[i].array() = kBeta2 * v_[i].array() + (1.0 - kBeta2) * g.square();
    p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + kEps);
  }
  return norm;
}

namespace {

class StateTable {
 public:
  explicit StateTable(const StateEncoder& encoder) : encoder_(&encoder) {}
  int intern(const std::string& text) {
    auto [it, fresh] = ids_.try_emplace(text, static_cast<int>(states_.size()));
    if (fresh) states_.push_back(encoder_->prepare(text));
    return it->second;
  }
  std::span<const EncodedState> states() const { return states_; }

 private:
  const StateEncoder* encoder_;
  std::unordered_map<std::string, int> ids_;
  std::vector<EncodedState> states_;
};

std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

constexpr std::uint64_t kShuffleSalt = 0x73687566666c65ULL;

}  // namespace

double initial_rtg_quantile(std::span<const trajgen::Trajectory> trajectories, double q) {
  std::vector<double> v;
  for (const auto& t : trajectories) {
    if (!t.steps.empty()) v.push_back(t.steps.front().rtg);
  }
  if (v.empty()) throw Error(ErrorCode::kEmptyDataset, "no trajectories");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TrainedPolicy train_decision_transformer(std::span<const trajgen::Trajectory> trajectories,
                                         const PolicyConfig& config,
                                         const EpochCallback& on_epoch) {
  if (trajectories.empty()) throw Error(ErrorCode::kEmptyDataset, "no trajectories to train on");
  TrainedPolicy out{DecisionTransformer(config), {}};
  auto& model = out.model;
  StateTable table(model.encoder());
  std::vector<DtSequence> data;
  data.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    if (t.steps.empty()) continue;
    if (static_cast<int>(t.steps.size()) > config.block_size) {
      throw Error(ErrorCode::kShapeMismatch, "trajectory for '" + t.claim_id + "' has " +
                                                 std::to_string(t.steps.size()) +
                                                 " steps; block size is " +
                                                 std::to_string(config.block_size));
    }
    DtSequence seq;
    for (const auto& s : t.steps) {
      if (s.action < 0 || s.action >= lexedit::kActionSpaceSize) {
        throw Error(ErrorCode::kShapeMismatch, "action id outside [0, 128)");
      }
      seq.steps.push_back(DtStep{s.rtg, table.intern(s.state), s.action});
    }
    data.push_back(std::move(seq));
  }
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no trajectories with steps");
  out.report.examples = data.size();
  model.target_rtg = initial_rtg_quantile(trajectories, 0.9);

  Adam adam(model.params().trainable(), config.learning_rate, config.grad_clip);
  std::mt19937_64 rng(config.seed ^ kShuffleSalt);
  const auto bs = static_cast<std::size_t>(config.batch_size);
  std::vector<DtSequence> batch;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = shuffled(data.size(), rng);
    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      batch.clear();
      std::size_t n = 0;
      for (std::size_t i = start; i < std::min(order.size(), start + bs); ++i) {
        batch.push_back(data[order[i]]);
        n += data[order[i]].steps.size();
      }
      model.params().zero_grad();
      const double loss = model.loss_and_backward(batch, table.states());
      if (epoch == 1 && start == 0) out.report.initial_loss = loss;
      adam.step();
      total += loss * static_cast<double>(n);
      steps += n;
    }
    const double epoch_loss = total / static_cast<double>(steps);
    out.report.epoch_losses.push_back(epoch_loss);
    spdlog::info("dt epoch {}/{} loss {:.6f}", epoch, config.epochs, epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  model.params().zero_grad();
  return out;
}

TrainedClassifier train_classifier(std::span<const trajgen::Trajectory> trajectories,
                                   const PolicyConfig& config, const EpochCallback& on_epoch) {
  TrainedClassifier out{ActionClassifier(config), {}};
  auto& model = out.model;
  StateTable table(model.encoder());
  std::vector<int> state_ids;
  std::vector<int> actions;
  for (const auto& t : trajectories) {
    if (t.steps.empty()) continue;
    const auto& s = t.steps.front();
    if (s.action < 0 || s.action >= lexedit::kActionSpaceSize) {
      throw Error(ErrorCode::kShapeMismatch, "action id outside [0, 128)");
    }
    state_ids.push_back(table.intern(s.state));
    actions.push_back(s.action);
  }
  if (actions.empty()) throw Error(ErrorCode::kEmptyDataset, "no first-step examples");
  out.report.examples = actions.size();

  Adam adam(model.params().trainable(), config.learning_rate, config.grad_clip);
  std::mt19937_64 rng(config.seed ^ kShuffleSalt);
  const auto bs = static_cast<std::size_t>(config.batch_size);
  std::vector<EncodedState> states;
  std::vector<int> targets;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = shuffled(actions.size(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      states.clear();
      targets.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + bs); ++i) {
        states.push_back(table.states()[state_ids[order[i]]]);
        targets.push_back(actions[order[i]]);
      }
      model.params().zero_grad();
      const double loss = model.loss_and_backward(states, targets);
      if (epoch == 1 && start == 0) out.report.initial_loss = loss;
      adam.step();
      total += loss * static_cast<double>(targets.size());
    }
    const double epoch_loss = total / static_cast<double>(actions.size());
    out.report.epoch_losses.push_back(epoch_loss);
    spdlog::info("classifier epoch {}/{} loss {:.6f}", epoch, config.epochs, epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  model.params().zero_grad();
  return out;
}

}  // namespace claimforge::policy
