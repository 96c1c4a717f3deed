#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "claimforge/policy/params.h"

namespace claimforge::policy::detail {

struct Linear {
  Param* w = nullptr;  // in x out
  Param* b = nullptr;  // 1 x out

  static Linear create(ParamSet& params, const std::string& name, int in, int out,
                       std::mt19937_64& rng);
  Matrix forward(const Matrix& x) const;
  Matrix backward(const Matrix& x, const Matrix& dy) const;
};

struct LayerNorm {
  Param* gamma = nullptr;
  Param* beta = nullptr;

  struct Cache {
    Matrix xhat;
    Eigen::VectorXd rstd;
  };
  static LayerNorm create(ParamSet& params, const std::string& name, int dim);
  Matrix forward(const Matrix& x, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& dy) const;
};

Matrix gelu(const Matrix& x);
Matrix gelu_backward(const Matrix& x, const Matrix& dy);

// Row layout for attention: `samples` blocks of `seq_len` consecutive rows.
// A row attends to earlier-or-equal rows of its block with the same
// validity flag, so real tokens never see padding.
struct AttentionLayout {
  int samples = 0;
  int seq_len = 0;
  std::vector<std::uint8_t> valid;  // samples * seq_len
  bool allowed(int sample, int query, int key) const {
    const auto base = static_cast<std::size_t>(sample) * seq_len;
    return key <= query && valid[base + key] == valid[base + query];
  }
};

struct CausalSelfAttention {
  Linear qkv;
  Linear proj;
  int heads = 1;

  struct Cache {
    Matrix qkv;
    std::vector<Matrix> probs;  // sample-major, then head
    Matrix merged;
  };
  Matrix forward(const Matrix& x, const AttentionLayout& layout, Cache* cache) const;
  Matrix backward(const Matrix& x, const Cache& cache, const AttentionLayout& layout,
                  const Matrix& dy) const;
};

struct Block {
  LayerNorm ln1;
  CausalSelfAttention attn;
  LayerNorm ln2;
  Linear fc;
  Linear out;

  struct Cache {
    LayerNorm::Cache ln1;
    Matrix h1;
    CausalSelfAttention::Cache attn;
    Matrix x1;
    LayerNorm::Cache ln2;
    Matrix h2;
    Matrix pre;
    Matrix act;
  };
  static Block create(ParamSet& params, const std::string& name, int dim, int heads,
                      std::mt19937_64& rng);
  Matrix forward(const Matrix& x, const AttentionLayout& layout, Cache* cache) const;
  Matrix backward(const Cache& cache, const AttentionLayout& layout, const Matrix& dy) const;
};

// Mean cross-entropy over rows; writes d(loss)/d(logits) when `grad` is set.
double cross_entropy(const Matrix& logits, const std::vector<int>& targets, Matrix* grad);

inline constexpr double kInitStd = 0.02;

}  // namespace claimforge::policy::detail
