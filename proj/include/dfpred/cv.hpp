#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dfpred/features.hpp"
#include "dfpred/gbr.hpp"
#include "dfpred/metrics.hpp"
#include "dfpred/mlp.hpp"
#include "dfpred/types.hpp"

namespace dfpred {

/// A trainer consumes standardized training data and returns a predictor in
/// standardized target space.
using Predictor = std::function<Vector(const Matrix&)>;
using Trainer = std::function<Predictor(const Matrix& x_std, const Vector& y_std,
                                        std::uint64_t seed)>;

Trainer make_gbr_trainer(GbrConfig cfg);
Trainer make_mlp_trainer(MlpConfig cfg);

struct CvFold {
  std::vector<Index> test_rows;
  Standardizer standardizer;  // fitted on this fold's training rows only
  Vector predictions;         // seconds, aligned with test_rows
};

struct CvResult {
  std::vector<CvFold> folds;
  Vector predictions;  // seconds, n; each row predicted exactly once
  Vector y;            // true targets
  EvaluationReport report() const;
};

/// k-fold cross-validation with a seeded shuffle. Fold sizes differ by at
/// most one. The standardizer (features and targets) is refit per fold on
/// the training part; predictions are de-standardized with the training
/// fold's target vector.
CvResult cross_validate(const Matrix& X, const Vector& y, int k, const Trainer& trainer,
                        std::uint64_t seed);

/// Seeded fold assignment: row index -> fold id, sizes differ by at most one.
std::vector<int> fold_assignment(Index n, int k, std::uint64_t seed);

struct LabeledDataset {
  std::string label;
  FeatureMatrix data;
};

struct AgnosticResult {
  MlpModel model;  // trained on all combined standardized rows
  std::vector<std::string> training_labels;
  std::vector<Standardizer> training_standardizers;  // full-set vectors per dataset
  Standardizer held_out_standardizer;                // fitted on the held-out set
  Vector held_out_predictions;                       // seconds
  EvaluationReport held_out_report;

  // k-fold validation over the combined training rows. Predictions are in
  // seconds, de-normalized per dataset with fold-local vectors.
  Vector combined_y;
  Vector combined_cv_predictions;
  std::vector<std::string> combined_labels;  // dataset label per combined row
  EvaluationReport combined_report;

  /// Validation scores restricted to one training dataset.
  EvaluationReport label_report(std::string_view label) const;
};

/// Combines training datasets after standardizing each with its own vectors,
/// trains the dropout MLP on the combined rows with k-fold validation
/// segments, and predicts the held-out dataset. Held-out predictions are
/// de-normalized with a target vector fitted on the held-out execution times.
AgnosticResult train_agnostic(std::span<const LabeledDataset> training,
                              const LabeledDataset& held_out, const MlpConfig& cfg,
                              int validation_folds = 8);

}  // namespace dfpred
