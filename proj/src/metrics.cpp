#include "dfpred/metrics.hpp"

#include "dfpred/errors.hpp"

namespace dfpred {

Vector percentage_errors(ConstVectorRef y, ConstVectorRef yhat) {
  if (y.size() != yhat.size()) throw DataError("percentage_errors: length mismatch");
  if (y.size() == 0) throw DataError("percentage_errors: empty input");
  Vector errors(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    if (y[i] <= 0) throw DataError("percentage_errors: true values must be > 0");
    errors[i] = std::abs(y[i] - yhat[i]) / y[i];
  }
  return errors;
}

double mape(ConstVectorRef y, ConstVectorRef yhat) {
  return percentage_errors(y, yhat).mean();
}

double psle(ConstVectorRef y, ConstVectorRef yhat, double x) {
  const Vector errors = percentage_errors(y, yhat);
  Index large = 0;
  for (Index i = 0; i < errors.size(); ++i)
    if (errors[i] > x) ++large;
  return static_cast<double>(large) / static_cast<double>(errors.size());
}

EvaluationReport evaluate_predictions(ConstVectorRef y, ConstVectorRef yhat, double x) {
  EvaluationReport report;
  report.per_sample_errors = percentage_errors(y, yhat);
  report.n = y.size();
  report.mape = report.per_sample_errors.mean();
  Index large = 0;
  for (Index i = 0; i < report.per_sample_errors.size(); ++i)
    if (report.per_sample_errors[i] > x) ++large;
  report.psle = static_cast<double>(large) / static_cast<double>(report.n);
  report.psle_threshold = x;
  return report;
}

}  // namespace dfpred
