#include "layers.h"

#include <cmath>
#include <limits>

namespace claimforge::policy::detail {

Linear Linear::create(ParamSet& params, const std::string& name, int in, int out,
                      std::mt19937_64& rng) {
  Linear l;
  l.w = &params.add_normal(name + ".weight", in, out, kInitStd, rng);
  l.b = &params.add(name + ".bias", 1, out);
  return l;
}

Matrix Linear::forward(const Matrix& x) const {
  Matrix y = x * w->value;
  y.rowwise() += b->value.row(0);
  return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) const {
  w->grad.noalias() += x.transpose() * dy;
  b->grad.row(0) += dy.colwise().sum();
  return dy * w->value.transpose();
}

LayerNorm LayerNorm::create(ParamSet& params, const std::string& name, int dim) {
  LayerNorm ln;
  ln.gamma = &params.add_constant(name + ".weight", 1, dim, 1.0);
  ln.beta = &params.add(name + ".bias", 1, dim);
  return ln;
}

Matrix LayerNorm::forward(const Matrix& x, Cache* cache) const {
  constexpr double kEps = 1e-5;
  const auto n = x.cols();
  Matrix xhat(x.rows(), n);
  Eigen::VectorXd rstd(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().mean();
    rstd(i) = 1.0 / std::sqrt(var + kEps);
    xhat.row(i) = (x.row(i).array() - mu) * rstd(i);
  }
  Matrix y = xhat.array().rowwise() * gamma->value.row(0).array();
  y.rowwise() += beta->value.row(0);
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->rstd = std::move(rstd);
  }
  return y;
}

Matrix LayerNorm::backward(const Cache& cache, const Matrix& dy) const {
  gamma->grad.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  beta->grad.row(0) += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * gamma->value.row(0).array();
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double m1 = dxhat.row(i).mean();
    const double m2 = (dxhat.row(i).array() * cache.xhat.row(i).array()).mean();
    dx.row(i) = cache.rstd(i) *
                (dxhat.row(i).array() - m1 - cache.xhat.row(i).array() * m2).matrix();
  }
  return dx;
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;
}  // namespace

Matrix gelu(const Matrix& x) {
  return x.unaryExpr([](double v) {
    return 0.5 * v * (1.0 + std::tanh(kGeluC * (v + kGeluA * v * v * v)));
  });
}

Matrix gelu_backward(const Matrix& x, const Matrix& dy) {
  Matrix d = x.unaryExpr([](double v) {
    const double t = std::tanh(kGeluC * (v + kGeluA * v * v * v));
    return 0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * v * v);
  });
  return d.cwiseProduct(dy);
}

Matrix CausalSelfAttention::forward(const Matrix& x, const AttentionLayout& layout,
                                    Cache* cache) const {
  const int d = static_cast<int>(x.cols());
  const int dh = d / heads;
  const int L = layout.seq_len;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix qkv_out = qkv.forward(x);
  Matrix merged(x.rows(), d);
  if (cache) cache->probs.assign(static_cast<std::size_t>(layout.samples) * heads, Matrix());
  for (int s = 0; s < layout.samples; ++s) {
    const auto rows = qkv_out.middleRows(static_cast<Eigen::Index>(s) * L, L);
    for (int h = 0; h < heads; ++h) {
      const Matrix q = rows.middleCols(h * dh, dh);
      const Matrix k = rows.middleCols(d + h * dh, dh);
      const Matrix v = rows.middleCols(2 * d + h * dh, dh);
      Matrix p = (q * k.transpose()) * scale;
      for (int i = 0; i < L; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < L; ++j) {
          if (layout.allowed(s, i, j)) mx = std::max(mx, p(i, j));
        }
        double sum = 0.0;
        for (int j = 0; j < L; ++j) {
          if (layout.allowed(s, i, j)) {
            p(i, j) = std::exp(p(i, j) - mx);
            sum += p(i, j);
          } else {
            p(i, j) = 0.0;
          }
        }
        p.row(i) /= sum;
      }
      merged.block(static_cast<Eigen::Index>(s) * L, h * dh, L, dh) = p * v;
      if (cache) cache->probs[static_cast<std::size_t>(s) * heads + h] = std::move(p);
    }
  }
  Matrix y = proj.forward(merged);
  if (cache) {
    cache->qkv = std::move(qkv_out);
    cache->merged = std::move(merged);
  }
  return y;
}

Matrix CausalSelfAttention::backward(const Matrix& x, const Cache& cache,
                                     const AttentionLayout& layout, const Matrix& dy) const {
  const int d = static_cast<int>(x.cols());
  const int dh = d / heads;
  const int L = layout.seq_len;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Matrix dmerged = proj.backward(cache.merged, dy);
  Matrix dqkv = Matrix::Zero(x.rows(), 3 * d);
  for (int s = 0; s < layout.samples; ++s) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(s) * L;
    const auto rows = cache.qkv.middleRows(r0, L);
    for (int h = 0; h < heads; ++h) {
      const Matrix& p = cache.probs[static_cast<std::size_t>(s) * heads + h];
      const Matrix q = rows.middleCols(h * dh, dh);
      const Matrix k = rows.middleCols(d + h * dh, dh);
      const Matrix v = rows.middleCols(2 * d + h * dh, dh);
      const Matrix dout = dmerged.block(r0, h * dh, L, dh);
      const Matrix dp = dout * v.transpose();
      dqkv.block(r0, 2 * d + h * dh, L, dh) += p.transpose() * dout;
      Matrix ds = p.cwiseProduct(dp);
      const Eigen::VectorXd rowdot = ds.rowwise().sum();
      ds -= (p.array().colwise() * rowdot.array()).matrix();
      ds *= scale;
      dqkv.block(r0, h * dh, L, dh) += ds * k;
      dqkv.block(r0, d + h * dh, L, dh) += ds.transpose() * q;
    }
  }
  return qkv.backward(x, dqkv);
}

Block Block::create(ParamSet& params, const std::string& name, int dim, int heads,
                    std::mt19937_64& rng) {
  Block b;
  b.ln1 = LayerNorm::create(params, name + ".ln1", dim);
  b.attn.qkv = Linear::create(params, name + ".attn.qkv", dim, 3 * dim, rng);
  b.attn.proj = Linear::create(params, name + ".attn.proj", dim, dim, rng);
  b.attn.heads = heads;
  b.ln2 = LayerNorm::create(params, name + ".ln2", dim);
  b.fc = Linear::create(params, name + ".mlp.fc", dim, 4 * dim, rng);
  b.out = Linear::create(params, name + ".mlp.proj", 4 * dim, dim, rng);
  return b;
}

Matrix Block::forward(const Matrix& x, const AttentionLayout& layout, Cache* cache) const {
  Cache local;
  Cache& c = cache ? *cache : local;
  c.h1 = ln1.forward(x, &c.ln1);
  c.x1 = x + attn.forward(c.h1, layout, cache ? &c.attn : nullptr);
  c.h2 = ln2.forward(c.x1, &c.ln2);
  c.pre = fc.forward(c.h2);
  c.act = gelu(c.pre);
  return c.x1 + out.forward(c.act);
}

Matrix Block::backward(const Cache& c, const AttentionLayout& layout, const Matrix& dy) const {
  const Matrix dact = out.backward(c.act, dy);
  const Matrix dpre = gelu_backward(c.pre, dact);
  const Matrix dh2 = fc.backward(c.h2, dpre);
  const Matrix dx1 = dy + ln2.backward(c.ln2, dh2);
  const Matrix dh1 = attn.backward(c.h1, c.attn, layout, dx1);
  return dx1 + ln1.backward(c.ln1, dh1);
}

double cross_entropy(const Matrix& logits, const std::vector<int>& targets, Matrix* grad) {
  const auto n = logits.rows();
  if (grad) grad->setZero(logits.rows(), logits.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mx = logits.row(i).maxCoeff();
    const RowVector e = (logits.row(i).array() - mx).exp().matrix();
    const double z = e.sum();
    total += std::log(z) + mx - logits(i, targets[i]);
    if (grad) {
      grad->row(i) = e / (z * static_cast<double>(n));
      (*grad)(i, targets[i]) -= 1.0 / static_cast<double>(n);
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace claimforge::policy::detail
