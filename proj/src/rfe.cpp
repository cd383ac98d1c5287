#include "dfpred/rfe.hpp"

#include <algorithm>

#include "dfpred/cv.hpp"
#include "dfpred/errors.hpp"
#include "dfpred/features.hpp"

namespace dfpred {

Vector folded_importances(const Matrix& X, const Vector& y, const GbrConfig& cfg, int folds,
                          std::uint64_t seed) {
  const std::vector<int> fold = fold_assignment(X.rows(), folds, seed);
  Vector total = Vector::Zero(X.cols());
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> train_rows;
    for (Index i = 0; i < X.rows(); ++i)
      if (fold[i] != f) train_rows.push_back(i);
    Matrix x_train(static_cast<Index>(train_rows.size()), X.cols());
    Vector y_train(static_cast<Index>(train_rows.size()));
    for (Index i = 0; i < static_cast<Index>(train_rows.size()); ++i) {
      x_train.row(i) = X.row(train_rows[i]);
      y_train[i] = y[train_rows[i]];
    }
    Standardizer s = fit_standardizer(x_train, y_train);
    GbrConfig c = cfg;
    c.seed = seed + static_cast<std::uint64_t>(f) + 1;
    GbrModel model =
        GbrModel::train(apply_standardizer(s, x_train), standardize_targets(s, y_train), c);
    total += model.feature_importance();
  }
  return total / static_cast<double>(folds);
}

ImportanceRanking rfe(const Matrix& X, const Vector& y, std::span<const std::string> names,
                      const GbrConfig& cfg, int folds, std::uint64_t seed) {
  if (static_cast<Index>(names.size()) != X.cols())
    throw DataError("rfe: feature name count does not match columns");
  if (names.size() < 6) throw UsageError("rfe: needs at least 6 features");

  std::vector<std::string> remaining(names.begin(), names.end());
  std::vector<Index> cols(remaining.size());
  for (Index i = 0; i < static_cast<Index>(cols.size()); ++i) cols[i] = i;

  ImportanceRanking ranking;
  while (!remaining.empty()) {
    Matrix x_sub(X.rows(), static_cast<Index>(cols.size()));
    for (Index j = 0; j < static_cast<Index>(cols.size()); ++j) x_sub.col(j) = X.col(cols[j]);
    Vector importance = folded_importances(x_sub, y, cfg, folds, seed);

    // Lowest importance goes; ties drop the later-alphabet name first.
    Index worst = 0;
    for (Index j = 1; j < importance.size(); ++j) {
      if (importance[j] < importance[worst] ||
          (importance[j] == importance[worst] && remaining[j] > remaining[worst]))
        worst = j;
    }
    ranking.elimination_order.push_back(remaining[worst]);
    remaining.erase(remaining.begin() + worst);
    cols.erase(cols.begin() + worst);

    if (remaining.size() == 5) {
      // Relevance scores from a final model on exactly the surviving five.
      Matrix x_top(X.rows(), 5);
      for (Index j = 0; j < 5; ++j) x_top.col(j) = X.col(cols[j]);
      Vector scores = folded_importances(x_top, y, cfg, folds, seed);
      const double total = scores.sum();
      if (total > 0) scores /= total;
      ranking.top5_scores.resize(5);
      // Strongest first.
      std::vector<Index> order{0, 1, 2, 3, 4};
      std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return remaining[a] < remaining[b];
      });
      for (Index i = 0; i < 5; ++i) {
        ranking.top5.push_back(remaining[order[i]]);
        ranking.top5_scores[i] = scores[order[i]];
      }
    }
  }
  return ranking;
}

}  // namespace dfpred
