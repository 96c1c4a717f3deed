#include "claimforge/policy/params.h"

#include "claimforge/error.h"

namespace claimforge::policy {

Param& ParamSet::add(std::string name, Eigen::Index rows, Eigen::Index cols, bool trainable) {
  if (find(name)) throw Error(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  auto p = std::make_unique<Param>();
  p->name = std::move(name);
  p->value = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  p->trainable = trainable;
  params_.push_back(std::move(p));
  return *params_.back();
}

Param& ParamSet::add_normal(std::string name, Eigen::Index rows, Eigen::Index cols,
                            double stddev, std::mt19937_64& rng, bool trainable) {
  auto& p = add(std::move(name), rows, cols, trainable);
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = dist(rng);
  return p;
}

Param& ParamSet::add_constant(std::string name, Eigen::Index rows, Eigen::Index cols,
                              double value) {
  auto& p = add(std::move(name), rows, cols);
  p.value.setConstant(value);
  return p;
}

Param* ParamSet::find(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

const Param* ParamSet::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

std::vector<Param*> ParamSet::trainable() {
  std::vector<Param*> out;
  for (auto& p : params_) {
    if (p->trainable) out.push_back(p.get());
  }
  return out;
}

std::size_t ParamSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    if (p->trainable) n += static_cast<std::size_t>(p->value.size());
  }
  return n;
}

void ParamSet::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

}  // namespace claimforge::policy
