#include "dfpred/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dfpred/errors.hpp"

namespace dfpred {

void MlpConfig::validate() const {
  if (hidden[0] < 1 || hidden[1] < 1) throw UsageError("MlpConfig: hidden sizes must be >= 1");
  if (dropout_rate < 0 || dropout_rate >= 1)
    throw UsageError("MlpConfig: dropout_rate must be in [0, 1)");
  if (epochs < 1) throw UsageError("MlpConfig: epochs must be >= 1");
  if (batch_size < 1) throw UsageError("MlpConfig: batch_size must be >= 1");
  if (learning_rate <= 0) throw UsageError("MlpConfig: learning_rate must be > 0");
}

namespace {

struct Forward {
  Matrix z1, a1;  // h1 x n
  Matrix z2, a2;  // h2 x n
  Vector out;     // n
};

// Batch forward pass; columns are samples. Optional inverted-dropout masks
// (already scaled by 1/keep) are applied to the hidden activations.
Forward forward(const MlpParams& p, const Matrix& xt, const Matrix* mask1, const Matrix* mask2) {
  Forward f;
  f.z1 = (p.w1 * xt).colwise() + p.b1;
  f.a1 = f.z1.cwiseMax(0.0);
  if (mask1) f.a1 = f.a1.cwiseProduct(*mask1);
  f.z2 = (p.w2 * f.a1).colwise() + p.b2;
  f.a2 = f.z2.cwiseMax(0.0);
  if (mask2) f.a2 = f.a2.cwiseProduct(*mask2);
  f.out = ((p.w3 * f.a2).colwise() + p.b3).transpose();
  return f;
}

// Gradients of mean squared error over the batch. Masks must match the
// forward pass that produced `f`.
MlpParams backward(const MlpParams& p, const Matrix& xt, const Vector& y, const Forward& f,
                   const Matrix* mask1, const Matrix* mask2) {
  const auto n = static_cast<double>(y.size());
  MlpParams g;
  Eigen::RowVectorXd delta_out = (2.0 / n) * (f.out - y).transpose();  // 1 x n

  g.w3 = delta_out * f.a2.transpose();
  g.b3 = Vector::Constant(1, delta_out.sum());

  Matrix delta2 = p.w3.transpose() * delta_out;  // h2 x n
  if (mask2) delta2 = delta2.cwiseProduct(*mask2);
  delta2 = delta2.cwiseProduct((f.z2.array() > 0.0).cast<double>().matrix());

  g.w2 = delta2 * f.a1.transpose();
  g.b2 = delta2.rowwise().sum();

  Matrix delta1 = p.w2.transpose() * delta2;  // h1 x n
  if (mask1) delta1 = delta1.cwiseProduct(*mask1);
  delta1 = delta1.cwiseProduct((f.z1.array() > 0.0).cast<double>().matrix());

  g.w1 = delta1 * xt.transpose();
  g.b1 = delta1.rowwise().sum();
  return g;
}

Matrix dropout_mask(Index rows, Index cols, double rate, std::mt19937_64& rng) {
  const double keep = 1.0 - rate;
  std::bernoulli_distribution keep_dist(keep);
  Matrix mask(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) mask(i, j) = keep_dist(rng) ? 1.0 / keep : 0.0;
  return mask;
}

}  // namespace

double mlp_loss(const MlpParams& p, const Matrix& X, const Vector& y) {
  const Matrix xt = X.transpose();
  Forward f = forward(p, xt, nullptr, nullptr);
  return (f.out - y).squaredNorm() / static_cast<double>(y.size());
}

MlpParams mlp_gradients(const MlpParams& p, const Matrix& X, const Vector& y) {
  const Matrix xt = X.transpose();
  Forward f = forward(p, xt, nullptr, nullptr);
  return backward(p, xt, y, f, nullptr, nullptr);
}

MlpParams mlp_init(Index n_features, const MlpConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  auto glorot = [&](Index rows, Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix w(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) w(i, j) = dist(rng);
    return w;
  };
  MlpParams p;
  p.w1 = glorot(cfg.hidden[0], n_features);
  p.b1 = Vector::Zero(cfg.hidden[0]);
  p.w2 = glorot(cfg.hidden[1], cfg.hidden[0]);
  p.b2 = Vector::Zero(cfg.hidden[1]);
  p.w3 = glorot(1, cfg.hidden[1]);
  p.b3 = Vector::Zero(1);
  return p;
}

MlpModel MlpModel::train(const Matrix& X, const Vector& y, const MlpConfig& cfg) {
  cfg.validate();
  if (X.rows() != y.size()) throw DataError("mlp_train: X/y row mismatch");
  if (X.rows() < 2) throw DataError("mlp_train: needs at least 2 rows");
  if (!X.allFinite() || !y.allFinite()) throw DataError("mlp_train: non-finite input");

  MlpModel model;
  model.cfg_ = cfg;
  model.params_ = mlp_init(X.cols(), cfg);
  // Separate stream for shuffling/dropout so init matches mlp_init exactly.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<Index> order(X.rows());
  std::iota(order.begin(), order.end(), Index{0});
  const bool use_dropout = cfg.dropout_rate > 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sse = 0;
    for (Index start = 0; start < X.rows(); start += cfg.batch_size) {
      const Index size = std::min<Index>(cfg.batch_size, X.rows() - start);
      Matrix xt(X.cols(), size);
      Vector yb(size);
      for (Index i = 0; i < size; ++i) {
        xt.col(i) = X.row(order[start + i]).transpose();
        yb[i] = y[order[start + i]];
      }
      Matrix mask1, mask2;
      const Matrix* m1 = nullptr;
      const Matrix* m2 = nullptr;
      if (use_dropout) {
        mask1 = dropout_mask(cfg.hidden[0], size, cfg.dropout_rate, rng);
        mask2 = dropout_mask(cfg.hidden[1], size, cfg.dropout_rate, rng);
        m1 = &mask1;
        m2 = &mask2;
      }
      Forward f = forward(model.params_, xt, m1, m2);
      epoch_sse += (f.out - yb).squaredNorm();
      MlpParams g = backward(model.params_, xt, yb, f, m1, m2);
      model.params_.w1 -= cfg.learning_rate * g.w1;
      model.params_.b1 -= cfg.learning_rate * g.b1;
      model.params_.w2 -= cfg.learning_rate * g.w2;
      model.params_.b2 -= cfg.learning_rate * g.b2;
      model.params_.w3 -= cfg.learning_rate * g.w3;
      model.params_.b3 -= cfg.learning_rate * g.b3;
    }
    const double loss = epoch_sse / static_cast<double>(X.rows());
    if (!std::isfinite(loss))
      throw NumericError("mlp_train: non-finite loss at epoch " + std::to_string(epoch) +
                         " (lr=" + std::to_string(cfg.learning_rate) + ")");
    model.epoch_loss_.push_back(loss);
  }
  return model;
}

Vector MlpModel::predict(const Matrix& X) const {
  if (X.cols() != params_.w1.cols()) throw DataError("mlp predict: feature count mismatch");
  const Matrix xt = X.transpose();
  return forward(params_, xt, nullptr, nullptr).out;
}

MlpModel MlpModel::from_parts(MlpConfig cfg, MlpParams params) {
  MlpModel model;
  model.cfg_ = cfg;
  model.params_ = std::move(params);
  return model;
}

}  // namespace dfpred
