#pragma once

#include <vector>

#include "dfpred/types.hpp"

namespace dfpred {

inline constexpr double kDefaultPsleThreshold = 0.15;

/// Mean absolute percentage error: (1/n) * sum |y_i - yhat_i| / y_i.
/// Requires equal nonzero lengths and y_i > 0.
double mape(ConstVectorRef y, ConstVectorRef yhat);

/// Percent of samples with large error: fraction with |y_i - yhat_i| / y_i
/// strictly greater than x.
double psle(ConstVectorRef y, ConstVectorRef yhat, double x = kDefaultPsleThreshold);

/// Per-sample absolute percentage errors.
Vector percentage_errors(ConstVectorRef y, ConstVectorRef yhat);

struct FoldScores {
  Index fold = 0;
  Index n = 0;
  double mape = 0;
  double psle = 0;
};

struct EvaluationReport {
  Index n = 0;
  double mape = 0;
  double psle = 0;
  double psle_threshold = kDefaultPsleThreshold;
  Vector per_sample_errors;
  std::vector<FoldScores> folds;
};

EvaluationReport evaluate_predictions(ConstVectorRef y, ConstVectorRef yhat,
                                      double x = kDefaultPsleThreshold);

}  // namespace dfpred
