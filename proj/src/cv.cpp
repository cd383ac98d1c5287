#include "dfpred/cv.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "dfpred/errors.hpp"

namespace dfpred {

Trainer make_gbr_trainer(GbrConfig cfg) {
  return [cfg](const Matrix& x, const Vector& y, std::uint64_t seed) -> Predictor {
    GbrConfig c = cfg;
    c.seed = seed;
    GbrModel model = GbrModel::train(x, y, c);
    return [model = std::move(model)](const Matrix& xq) { return model.predict(xq); };
  };
}

Trainer make_mlp_trainer(MlpConfig cfg) {
  return [cfg](const Matrix& x, const Vector& y, std::uint64_t seed) -> Predictor {
    MlpConfig c = cfg;
    c.seed = seed;
    MlpModel model = MlpModel::train(x, y, c);
    return [model = std::move(model)](const Matrix& xq) { return model.predict(xq); };
  };
}

std::vector<int> fold_assignment(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("cross_validate: k must be >= 2");
  if (static_cast<Index>(k) > n) throw UsageError("cross_validate: k exceeds row count");
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  // First (n mod k) folds get one extra row.
  std::vector<int> fold(n, -1);
  const Index base = n / k;
  const Index extra = n % k;
  Index pos = 0;
  for (int f = 0; f < k; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    for (Index i = 0; i < size; ++i) fold[order[pos++]] = f;
  }
  return fold;
}

EvaluationReport CvResult::report() const {
  EvaluationReport r = evaluate_predictions(y, predictions);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    FoldScores s;
    s.fold = static_cast<Index>(f);
    s.n = static_cast<Index>(folds[f].test_rows.size());
    Vector yt(s.n);
    for (Index i = 0; i < s.n; ++i) yt[i] = y[folds[f].test_rows[i]];
    s.mape = mape(yt, folds[f].predictions);
    s.psle = psle(yt, folds[f].predictions);
    r.folds.push_back(s);
  }
  return r;
}

CvResult cross_validate(const Matrix& X, const Vector& y, int k, const Trainer& trainer,
                        std::uint64_t seed) {
  if (X.rows() != y.size()) throw DataError("cross_validate: X/y row mismatch");
  const std::vector<int> fold = fold_assignment(X.rows(), k, seed);

  CvResult result;
  result.y = y;
  result.predictions.resize(X.rows());
  result.folds.resize(k);

  for (int f = 0; f < k; ++f) {
    std::vector<Index> train_rows, test_rows;
    for (Index i = 0; i < X.rows(); ++i)
      (fold[i] == f ? test_rows : train_rows).push_back(i);

    Matrix x_train(static_cast<Index>(train_rows.size()), X.cols());
    Vector y_train(static_cast<Index>(train_rows.size()));
    for (Index i = 0; i < static_cast<Index>(train_rows.size()); ++i) {
      x_train.row(i) = X.row(train_rows[i]);
      y_train[i] = y[train_rows[i]];
    }
    Matrix x_test(static_cast<Index>(test_rows.size()), X.cols());
    for (Index i = 0; i < static_cast<Index>(test_rows.size()); ++i)
      x_test.row(i) = X.row(test_rows[i]);

    Standardizer s = fit_standardizer(x_train, y_train);
    Predictor predict = trainer(apply_standardizer(s, x_train), standardize_targets(s, y_train),
                                seed + static_cast<std::uint64_t>(f) + 1);
    Vector z = predict(apply_standardizer(s, x_test));
    Vector pred_seconds = destandardize_predictions(s, z);

    CvFold& out = result.folds[f];
    out.test_rows = test_rows;
    out.standardizer = std::move(s);
    out.predictions = pred_seconds;
    for (Index i = 0; i < static_cast<Index>(test_rows.size()); ++i)
      result.predictions[test_rows[i]] = pred_seconds[i];
  }
  return result;
}

EvaluationReport AgnosticResult::label_report(std::string_view label) const {
  std::vector<Index> rows;
  for (Index i = 0; i < static_cast<Index>(combined_labels.size()); ++i)
    if (combined_labels[i] == label) rows.push_back(i);
  if (rows.empty()) throw DataError("label not present in combined data: " + std::string(label));
  Vector yt(static_cast<Index>(rows.size())), yp(static_cast<Index>(rows.size()));
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    yt[i] = combined_y[rows[i]];
    yp[i] = combined_cv_predictions[rows[i]];
  }
  return evaluate_predictions(yt, yp);
}

AgnosticResult train_agnostic(std::span<const LabeledDataset> training,
                              const LabeledDataset& held_out, const MlpConfig& cfg,
                              int validation_folds) {
  if (training.size() < 2) throw UsageError("train_agnostic: needs >= 2 training datasets");
  for (const auto& d : training) {
    if (d.data.feature_names != held_out.data.feature_names)
      throw DataError("train_agnostic: feature names differ across datasets");
    if (d.label == held_out.label)
      throw UsageError("train_agnostic: held-out label present in training set");
  }

  AgnosticResult result;
  Index total = 0;
  for (const auto& d : training) total += d.data.rows();
  const Index dims = held_out.data.cols();

  // Concatenated raw rows with per-row dataset tags.
  Matrix x_all(total, dims);
  Vector y_all(total);
  std::vector<int> dataset_of_row(total);
  Index at = 0;
  for (int d = 0; d < static_cast<int>(training.size()); ++d) {
    const FeatureMatrix& fm = training[d].data;
    x_all.middleRows(at, fm.rows()) = fm.X;
    y_all.segment(at, fm.rows()) = fm.y;
    for (Index i = 0; i < fm.rows(); ++i) {
      dataset_of_row[at + i] = d;
      result.combined_labels.push_back(training[d].label);
    }
    at += fm.rows();
    result.training_labels.push_back(training[d].label);
  }
  result.combined_y = y_all;

  // k-fold validation over the combined rows. Within each fold, every
  // dataset is standardized with vectors fitted on its rows in the training
  // part only; test predictions are de-normalized per dataset.
  const std::vector<int> fold = fold_assignment(total, validation_folds, cfg.seed);
  result.combined_cv_predictions.resize(total);
  for (int f = 0; f < validation_folds; ++f) {
    std::vector<Standardizer> fold_standardizers;
    for (int d = 0; d < static_cast<int>(training.size()); ++d) {
      std::vector<Index> rows;
      for (Index i = 0; i < total; ++i)
        if (dataset_of_row[i] == d && fold[i] != f) rows.push_back(i);
      if (rows.size() < 2)
        throw DataError("train_agnostic: dataset " + training[d].label +
                        " has fewer than 2 training rows in a validation fold");
      Matrix xd(static_cast<Index>(rows.size()), dims);
      Vector yd(static_cast<Index>(rows.size()));
      for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
        xd.row(i) = x_all.row(rows[i]);
        yd[i] = y_all[rows[i]];
      }
      fold_standardizers.push_back(fit_standardizer(xd, yd));
    }

    std::vector<Index> train_rows, test_rows;
    for (Index i = 0; i < total; ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
    auto standardize_row = [&](Index i) -> std::pair<Vector, double> {
      const Standardizer& s = fold_standardizers[dataset_of_row[i]];
      Vector x = (x_all.row(i).transpose() - s.mean).cwiseQuotient(s.std);
      const double yz = (y_all[i] - s.target_mean) / s.target_std;
      return {x, yz};
    };
    Matrix x_train(static_cast<Index>(train_rows.size()), dims);
    Vector y_train(static_cast<Index>(train_rows.size()));
    for (Index i = 0; i < static_cast<Index>(train_rows.size()); ++i) {
      auto [x, yz] = standardize_row(train_rows[i]);
      x_train.row(i) = x.transpose();
      y_train[i] = yz;
    }
    MlpConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + static_cast<std::uint64_t>(f) + 1;
    MlpModel fold_model = MlpModel::train(x_train, y_train, fold_cfg);
    for (Index i : test_rows) {
      const Standardizer& s = fold_standardizers[dataset_of_row[i]];
      Vector x = (x_all.row(i).transpose() - s.mean).cwiseQuotient(s.std);
      const double z = fold_model.predict(x.transpose())[0];
      result.combined_cv_predictions[i] = z * s.target_std + s.target_mean;
    }
  }
  result.combined_report = evaluate_predictions(result.combined_y, result.combined_cv_predictions);

  // Final model on all combined rows, each dataset standardized with its
  // full-set vectors.
  Matrix x_std(total, dims);
  Vector y_std(total);
  for (int d = 0; d < static_cast<int>(training.size()); ++d)
    result.training_standardizers.push_back(
        fit_standardizer(training[d].data.X, training[d].data.y));
  for (Index i = 0; i < total; ++i) {
    const Standardizer& s = result.training_standardizers[dataset_of_row[i]];
    x_std.row(i) = ((x_all.row(i).transpose() - s.mean).cwiseQuotient(s.std)).transpose();
    y_std[i] = (y_all[i] - s.target_mean) / s.target_std;
  }
  result.model = MlpModel::train(x_std, y_std, cfg);

  // Held-out predictions de-normalized with the held-out oracle vectors.
  result.held_out_standardizer = fit_standardizer(held_out.data.X, held_out.data.y);
  Vector z = result.model.predict(
      apply_standardizer(result.held_out_standardizer, held_out.data.X));
  result.held_out_predictions = destandardize_predictions(result.held_out_standardizer, z);
  result.held_out_report = evaluate_predictions(held_out.data.y, result.held_out_predictions);
  return result;
}

}  // namespace dfpred
