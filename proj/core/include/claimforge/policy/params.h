#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace claimforge::policy {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  bool trainable = true;
};

// Named tensors with stable addresses; layers keep raw pointers into it.
class ParamSet {
 public:
  Param& add(std::string name, Eigen::Index rows, Eigen::Index cols, bool trainable = true);
  Param& add_normal(std::string name, Eigen::Index rows, Eigen::Index cols, double stddev,
                    std::mt19937_64& rng, bool trainable = true);
  Param& add_constant(std::string name, Eigen::Index rows, Eigen::Index cols, double value);

  Param* find(std::string_view name);
  const Param* find(std::string_view name) const;
  std::vector<Param*> trainable();
  const std::vector<std::unique_ptr<Param>>& all() const noexcept { return params_; }
  std::size_t parameter_count() const;

  void zero_grad();

 private:
  std::vector<std::unique_ptr<Param>> params_;
};

}  // namespace claimforge::policy
