#pragma once

#include <functional>
#include <span>
#include <vector>

#include "claimforge/policy/classifier.h"
#include "claimforge/policy/decision_transformer.h"
#include "claimforge/trajgen/trajectory.h"

namespace claimforge::policy {

struct TrainReport {
  double initial_loss = 0.0;  // first batch, before any update
  std::vector<double> epoch_losses;
  std::size_t examples = 0;
};

using EpochCallback = std::function<void(int epoch, double loss)>;

// Adam with bias correction, constant learning rate, global-norm clipping.
class Adam {
 public:
  Adam(std::vector<Param*> params, double learning_rate, double grad_clip);
  // Returns the pre-clip global gradient norm.
  double step();

 private:
  std::vector<Param*> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  double lr_;
  double clip_;
  long t_ = 0;
};

struct TrainedPolicy {
  DecisionTransformer model;
  TrainReport report;
};

struct TrainedClassifier {
  ActionClassifier model;
  TrainReport report;
};

// Throws Error(kEmptyDataset) and Error(kShapeMismatch) for trajectories
// longer than the block size.
TrainedPolicy train_decision_transformer(std::span<const trajgen::Trajectory> trajectories,
                                         const PolicyConfig& config,
                                         const EpochCallback& on_epoch = {});

// Trains on the first step of each trajectory.
TrainedClassifier train_classifier(std::span<const trajgen::Trajectory> trajectories,
                                   const PolicyConfig& config,
                                   const EpochCallback& on_epoch = {});

// Linear-interpolated quantile of the trajectories' first-step RTGs.
double initial_rtg_quantile(std::span<const trajgen::Trajectory> trajectories, double q);

}  // namespace claimforge::policy
