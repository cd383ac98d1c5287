#pragma once

#include <cstdint>
#include <vector>

#include "dfpred/types.hpp"

namespace dfpred {

struct GbrConfig {
  int n_trees = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Axis-aligned split node. feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;             // leaf prediction (mean residual)
  double impurity_decrease = 0;  // SSE reduction attributed to this split
  int n_samples = 0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(ConstVectorRef x) const;
  bool has_splits() const { return !nodes.empty() && nodes[0].feature >= 0; }
};

/// Gradient boosted regression: squared loss, exact greedy splits, each stage
/// fit to the residuals of the previous prediction. Deterministic for fixed
/// config and data.
class GbrModel {
 public:
  static GbrModel train(const Matrix& X, const Vector& y, const GbrConfig& cfg);

  Vector predict(const Matrix& X) const;
  double predict_row(ConstVectorRef x) const;

  /// Per-feature total SSE reduction over all splits, normalized to sum 1.
  /// A model without any split yields all zeros (check no_splits()).
  Vector feature_importance() const;
  bool no_splits() const;

  double initial_prediction() const { return initial_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  const GbrConfig& config() const { return cfg_; }
  /// Training MSE after each stage (stage 0 = initial prediction).
  const std::vector<double>& stage_mse() const { return stage_mse_; }
  Index n_features() const { return n_features_; }

  // Used by artifact deserialization.
  static GbrModel from_parts(GbrConfig cfg, double initial, std::vector<RegressionTree> trees,
                             Index n_features);

 private:
  GbrConfig cfg_;
  double initial_ = 0;
  std::vector<RegressionTree> trees_;
  std::vector<double> stage_mse_;
  Index n_features_ = 0;
};

struct ImportanceResult {
  Vector importances;
  bool no_splits = false;
};

/// Spec-named wrapper around GbrModel::feature_importance.
ImportanceResult gbr_feature_importance(const GbrModel& model);

}  // namespace dfpred
