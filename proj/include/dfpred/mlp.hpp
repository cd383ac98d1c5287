#pragma once

#include <array>
#include <cstdint>

#include "dfpred/types.hpp"

namespace dfpred {

struct MlpConfig {
  std::array<int, 2> hidden{8, 8};
  double dropout_rate = 0.5;  // applied after each hidden layer, training only
  int epochs = 200;
  int batch_size = 16;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Weights of the d -> h1 -> h2 -> 1 network. Hidden layers are
/// rectified-linear, the output is linear.
struct MlpParams {
  Matrix w1;  // h1 x d
  Vector b1;  // h1
  Matrix w2;  // h2 x h1
  Vector b2;  // h2
  Matrix w3;  // 1 x h2
  Vector b3;  // 1
};

/// Mean squared error over the batch at the given parameters (no dropout).
double mlp_loss(const MlpParams& p, const Matrix& X, const Vector& y);

/// Analytic gradients of mlp_loss (no dropout), for the finite-difference
/// check and shared by training.
MlpParams mlp_gradients(const MlpParams& p, const Matrix& X, const Vector& y);

/// Seeded symmetry-breaking init: uniform(-limit, limit) per layer with
/// limit = sqrt(6 / (fan_in + fan_out)), biases zero.
MlpParams mlp_init(Index n_features, const MlpConfig& cfg);

class MlpModel {
 public:
  /// Mini-batch gradient descent on squared loss with inverted dropout on
  /// the hidden layers. Deterministic for a fixed seed. Throws NumericError
  /// if the loss turns non-finite.
  static MlpModel train(const Matrix& X, const Vector& y, const MlpConfig& cfg);

  /// Deterministic inference; dropout disabled, no rescaling needed.
  Vector predict(const Matrix& X) const;

  const MlpParams& params() const { return params_; }
  const MlpConfig& config() const { return cfg_; }
  Index n_features() const { return params_.w1.cols(); }
  /// Training loss after each epoch.
  const std::vector<double>& epoch_loss() const { return epoch_loss_; }

  static MlpModel from_parts(MlpConfig cfg, MlpParams params);

 private:
  MlpConfig cfg_;
  MlpParams params_;
  std::vector<double> epoch_loss_;
};

}  // namespace dfpred
