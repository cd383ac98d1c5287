#include "dfpred/gbr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dfpred/errors.hpp"

namespace dfpred {

void GbrConfig::validate() const {
  if (n_trees < 1) throw UsageError("GbrConfig: n_trees must be >= 1");
  if (learning_rate <= 0 || learning_rate > 1)
    throw UsageError("GbrConfig: learning_rate must be in (0, 1]");
  if (max_depth < 1) throw UsageError("GbrConfig: max_depth must be >= 1");
  if (min_samples_leaf < 1) throw UsageError("GbrConfig: min_samples_leaf must be >= 1");
}

double RegressionTree::predict_row(ConstVectorRef x) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& n = nodes[node];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[node].value;
}

namespace {

struct TreeBuilder {
  const Matrix& X;
  const Vector& residuals;
  const GbrConfig& cfg;
  RegressionTree tree;
  // Per-node working set of row indices.
  std::vector<Index> rows;

  struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0;
    double gain = 0;   // SSE reduction
    Index n_left = 0;  // rows with x <= threshold
  };

  // Best exact-greedy split of rows[lo, hi). Deterministic: features scanned
  // in order, strictly better gain required to replace the incumbent.
  Split best_split(Index lo, Index hi) {
    const Index n = hi - lo;
    Split best;
    if (n < 2 * cfg.min_samples_leaf) return best;

    double sum = 0, sum_sq = 0;
    for (Index i = lo; i < hi; ++i) {
      const double r = residuals[rows[i]];
      sum += r;
      sum_sq += r * r;
    }
    const double parent_sse = sum_sq - sum * sum / static_cast<double>(n);
    if (parent_sse <= 0) return best;

    std::vector<Index> order(rows.begin() + lo, rows.begin() + hi);
    for (int f = 0; f < X.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double xa = X(a, f), xb = X(b, f);
        if (xa != xb) return xa < xb;
        return a < b;  // stable under permutations of equal values
      });
      double left_sum = 0, left_sq = 0;
      for (Index i = 0; i + 1 < n; ++i) {
        const double r = residuals[order[i]];
        left_sum += r;
        left_sq += r * r;
        const Index n_left = i + 1;
        const Index n_right = n - n_left;
        if (n_left < cfg.min_samples_leaf) continue;
        if (n_right < cfg.min_samples_leaf) break;
        const double x_here = X(order[i], f);
        const double x_next = X(order[i + 1], f);
        if (x_here == x_next) continue;  // cannot split between equal values
        const double right_sum = sum - left_sum;
        const double right_sq = sum_sq - left_sq;
        const double left_sse = left_sq - left_sum * left_sum / static_cast<double>(n_left);
        const double right_sse = right_sq - right_sum * right_sum / static_cast<double>(n_right);
        const double gain = parent_sse - left_sse - right_sse;
        if (gain > best.gain) {
          best.found = true;
          best.feature = f;
          best.threshold = x_here + (x_next - x_here) / 2.0;
          best.gain = gain;
          best.n_left = n_left;
        }
      }
    }
    return best;
  }

  // Builds the subtree over rows[lo, hi); returns its node index.
  int build(Index lo, Index hi, int depth) {
    const Index n = hi - lo;
    double sum = 0;
    for (Index i = lo; i < hi; ++i) sum += residuals[rows[i]];
    const double mean = sum / static_cast<double>(n);

    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_index].n_samples = static_cast<int>(n);
    tree.nodes[node_index].value = mean;

    if (depth >= cfg.max_depth) return node_index;
    Split split = best_split(lo, hi);
    if (!split.found || split.gain <= 0) return node_index;

    // Partition rows around the threshold, keeping relative order.
    std::stable_partition(rows.begin() + lo, rows.begin() + hi,
                          [&](Index r) { return X(r, split.feature) <= split.threshold; });
    const Index mid = lo + split.n_left;

    tree.nodes[node_index].feature = split.feature;
    tree.nodes[node_index].threshold = split.threshold;
    tree.nodes[node_index].impurity_decrease = split.gain;
    const int left = build(lo, mid, depth + 1);
    tree.nodes[node_index].left = left;
    const int right = build(mid, hi, depth + 1);
    tree.nodes[node_index].right = right;
    return node_index;
  }
};

}  // namespace

GbrModel GbrModel::train(const Matrix& X, const Vector& y, const GbrConfig& cfg) {
  cfg.validate();
  if (X.rows() != y.size()) throw DataError("gbr_train: X/y row mismatch");
  if (X.rows() < 2 * cfg.min_samples_leaf)
    throw DataError("gbr_train: needs at least 2*min_samples_leaf rows");
  if (!X.allFinite() || !y.allFinite()) throw DataError("gbr_train: non-finite input");

  GbrModel model;
  model.cfg_ = cfg;
  model.n_features_ = X.cols();
  model.initial_ = y.mean();

  Vector residuals = y.array() - model.initial_;
  model.stage_mse_.push_back(residuals.squaredNorm() / static_cast<double>(y.size()));

  for (int t = 0; t < cfg.n_trees; ++t) {
    if (residuals.squaredNorm() == 0) break;  // constant targets: nothing left to fit

    TreeBuilder builder{X, residuals, cfg, {}, {}};
    builder.rows.resize(X.rows());
    std::iota(builder.rows.begin(), builder.rows.end(), Index{0});
    builder.build(0, X.rows(), 0);
    if (!builder.tree.has_splits()) break;  // no usable split; further stages are no-ops

    for (Index i = 0; i < X.rows(); ++i)
      residuals[i] -= cfg.learning_rate * builder.tree.predict_row(X.row(i));
    model.trees_.push_back(std::move(builder.tree));
    model.stage_mse_.push_back(residuals.squaredNorm() / static_cast<double>(y.size()));
  }
  return model;
}

Vector GbrModel::predict(const Matrix& X) const {
  if (X.cols() != n_features_) throw DataError("gbr predict: feature count mismatch");
  Vector out = Vector::Constant(X.rows(), initial_);
  for (const RegressionTree& tree : trees_)
    for (Index i = 0; i < X.rows(); ++i)
      out[i] += cfg_.learning_rate * tree.predict_row(X.row(i));
  return out;
}

double GbrModel::predict_row(ConstVectorRef x) const {
  double out = initial_;
  for (const RegressionTree& tree : trees_) out += cfg_.learning_rate * tree.predict_row(x);
  return out;
}

bool GbrModel::no_splits() const {
  for (const RegressionTree& tree : trees_)
    if (tree.has_splits()) return false;
  return true;
}

Vector GbrModel::feature_importance() const {
  Vector importance = Vector::Zero(n_features_);
  for (const RegressionTree& tree : trees_)
    for (const TreeNode& node : tree.nodes)
      if (node.feature >= 0) importance[node.feature] += node.impurity_decrease;
  const double total = importance.sum();
  if (total > 0) importance /= total;
  return importance;
}

GbrModel GbrModel::from_parts(GbrConfig cfg, double initial, std::vector<RegressionTree> trees,
                              Index n_features) {
  GbrModel model;
  model.cfg_ = cfg;
  model.initial_ = initial;
  model.trees_ = std::move(trees);
  model.n_features_ = n_features;
  return model;
}

ImportanceResult gbr_feature_importance(const GbrModel& model) {
  ImportanceResult result;
  result.no_splits = model.no_splits();
  result.importances = model.feature_importance();
  return result;
}

}  // namespace dfpred
