#include <doctest.h>

#include <random>

#include "dfpred/errors.hpp"
#include "dfpred/features.hpp"
#include "dfpred/metrics.hpp"
#include "dfpred/mlp.hpp"

using namespace dfpred;

namespace {

// Flattens params for the finite-difference sweep.
std::vector<double*> param_entries(MlpParams& p) {
  std::vector<double*> out;
  for (Matrix* m : {&p.w1, &p.w2, &p.w3})
    for (Index i = 0; i < m->size(); ++i) out.push_back(m->data() + i);
  for (Vector* v : {&p.b1, &p.b2, &p.b3})
    for (Index i = 0; i < v->size(); ++i) out.push_back(v->data() + i);
  return out;
}

// Resamples until no pre-activation sits near a ReLU kink, so the central
// difference is valid.
bool safe_from_kinks(const MlpParams& p, const Matrix& x) {
  const Matrix xt = x.transpose();
  Matrix z1 = (p.w1 * xt).colwise() + p.b1;
  Matrix z2 = (p.w2 * z1.cwiseMax(0.0)).colwise() + p.b2;
  return z1.array().abs().minCoeff() > 1e-3 && z2.array().abs().minCoeff() > 1e-3;
}

}  // namespace

TEST_CASE("backpropagation matches central finite differences") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0, 1);
  MlpConfig cfg;
  cfg.hidden = {4, 3};

  int done = 0;
  int attempts = 0;
  while (done < 20 && attempts < 200) {
    ++attempts;
    cfg.seed = rng();
    const Index d = 3;
    const Index n = 5;
    MlpParams p = mlp_init(d, cfg);
    // Nonzero biases so the bias gradients are exercised away from zero.
    for (Index i = 0; i < p.b1.size(); ++i) p.b1[i] = 0.1 * normal(rng);
    for (Index i = 0; i < p.b2.size(); ++i) p.b2[i] = 0.1 * normal(rng);
    p.b3[0] = 0.1 * normal(rng);

    Matrix x(n, d);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) x(i, j) = normal(rng);
      y[i] = normal(rng);
    }
    if (!safe_from_kinks(p, x)) continue;

    MlpParams analytic = mlp_gradients(p, x, y);
    auto analytic_entries = param_entries(analytic);
    auto entries = param_entries(p);

    const double h = 1e-6;
    double worst = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      double* w = entries[k];
      const double saved = *w;
      *w = saved + h;
      const double up = mlp_loss(p, x, y);
      *w = saved - h;
      const double down = mlp_loss(p, x, y);
      *w = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic_value = *analytic_entries[k];
      const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic_value)});
      worst = std::max(worst, std::abs(numeric - analytic_value) / scale);
    }
    CHECK(worst < 1e-4);
    ++done;
  }
  CHECK(done == 20);
}

TEST_CASE("mlp learns a linear relationship") {
  // y = 2x on 200 points; train on 160, evaluate MAPE on the held-out 40.
  // The 50% dropout shrinks predictions toward the mean, so the check also
  // requires clearly beating the mean predictor, not just the 10% bound.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> input(8.0, 12.0);
  Matrix x(200, 1);
  Vector y(200);
  for (Index i = 0; i < 200; ++i) {
    x(i, 0) = input(rng);
    y[i] = 2.0 * x(i, 0);
  }
  Matrix x_train = x.topRows(160), x_test = x.bottomRows(40);
  Vector y_train = y.head(160), y_test = y.tail(40);

  Standardizer s = fit_standardizer(x_train, y_train);
  MlpConfig cfg;
  cfg.seed = 3;
  MlpModel model =
      MlpModel::train(apply_standardizer(s, x_train), standardize_targets(s, y_train), cfg);
  Vector pred = destandardize_predictions(s, model.predict(apply_standardizer(s, x_test)));
  const double model_mape = mape(y_test, pred);
  CHECK(model_mape < 0.10);
  const double baseline = mape(y_test, Vector::Constant(40, y_train.mean()));
  CHECK(model_mape < 0.75 * baseline);
}

TEST_CASE("training and inference are deterministic") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> normal(0, 1);
  Matrix x(50, 3);
  Vector y(50);
  for (Index i = 0; i < 50; ++i) {
    for (Index j = 0; j < 3; ++j) x(i, j) = normal(rng);
    y[i] = x.row(i).sum() + 0.1 * normal(rng);
  }
  MlpConfig cfg;
  cfg.seed = 11;
  cfg.epochs = 30;
  MlpModel a = MlpModel::train(x, y, cfg);
  MlpModel b = MlpModel::train(x, y, cfg);
  CHECK(a.params().w1 == b.params().w1);
  CHECK(a.params().w3 == b.params().w3);
  CHECK(a.predict(x) == b.predict(x));  // dropout is off at inference

  MlpConfig other = cfg;
  other.seed = 12;
  MlpModel c = MlpModel::train(x, y, other);
  CHECK(a.predict(x) != c.predict(x));
}

TEST_CASE("init breaks symmetry with seeded uniform weights") {
  MlpConfig cfg;
  cfg.seed = 4;
  MlpParams p = mlp_init(6, cfg);
  CHECK(p.w1.cwiseAbs().maxCoeff() > 0);
  CHECK(p.w1(0, 0) != p.w1(1, 0));
  CHECK(p.b1.isZero(0));
  // Glorot bound.
  CHECK(p.w1.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (8 + 6)));
}

TEST_CASE("diverging training reports a numerical failure") {
  Matrix x(8, 1);
  Vector y(8);
  for (Index i = 0; i < 8; ++i) {
    x(i, 0) = static_cast<double>(i);
    y[i] = 1000.0 * static_cast<double>(i);
  }
  MlpConfig cfg;
  cfg.learning_rate = 1e12;
  cfg.epochs = 50;
  CHECK_THROWS_AS(MlpModel::train(x, y, cfg), NumericError);
}

TEST_CASE("mlp config validation") {
  MlpConfig cfg;
  cfg.dropout_rate = 1.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}
