#include <doctest.h>

#include <random>

#include "dfpred/gbr.hpp"
#include "dfpred/errors.hpp"

using namespace dfpred;

TEST_CASE("constant targets yield a zero-tree mean model") {
  Matrix x(6, 2);
  x.setRandom();
  Vector y = Vector::Constant(6, 3.5);
  GbrModel model = GbrModel::train(x, y, {});
  CHECK(model.trees().empty());
  Vector pred = model.predict(x);
  for (Index i = 0; i < pred.size(); ++i) CHECK(pred[i] == 3.5);
  CHECK(model.no_splits());
}

TEST_CASE("a single stump fits a perfectly separable binary feature") {
  Matrix x(4, 1);
  x << 0, 0, 1, 1;
  Vector y(4);
  y << -1, -1, 1, 1;
  GbrConfig cfg;
  cfg.n_trees = 1;
  cfg.learning_rate = 1.0;
  cfg.max_depth = 1;
  GbrModel model = GbrModel::train(x, y, cfg);
  REQUIRE(model.trees().size() == 1);
  Vector pred = model.predict(x);
  for (Index i = 0; i < 4; ++i) CHECK(pred[i] == doctest::Approx(y[i]).epsilon(1e-12));
  CHECK(model.stage_mse().back() == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("training MSE is nonincreasing stage by stage") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0, 1);
  Matrix x(80, 4);
  Vector y(80);
  for (Index i = 0; i < 80; ++i) {
    for (Index j = 0; j < 4; ++j) x(i, j) = normal(rng);
    y[i] = 2 * x(i, 0) - x(i, 1) + 0.3 * normal(rng);
  }
  GbrModel model = GbrModel::train(x, y, {});
  const auto& mse = model.stage_mse();
  REQUIRE(mse.size() >= 2);
  for (std::size_t i = 1; i < mse.size(); ++i) CHECK(mse[i] <= mse[i - 1] + 1e-12);
  CHECK(mse.back() < mse.front());
}

TEST_CASE("feature importance") {
  SUBCASE("single stump puts all importance on its feature") {
    Matrix x(4, 3);
    x << 0, 7, 1, 0, 7, 2, 1, 7, 3, 1, 7, 4;
    Vector y(4);
    y << -1, -1, 1, 1;
    GbrConfig cfg;
    cfg.n_trees = 1;
    cfg.learning_rate = 1.0;
    cfg.max_depth = 1;
    GbrModel model = GbrModel::train(x, y, cfg);
    auto imp = gbr_feature_importance(model);
    CHECK(!imp.no_splits);
    CHECK(imp.importances[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(imp.importances[1] == 0.0);
  }

  SUBCASE("planted signal ranks first and sums to one") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal(0, 1);
    Matrix x(200, 8);
    Vector y(200);
    for (Index i = 0; i < 200; ++i) {
      for (Index j = 0; j < 8; ++j) x(i, j) = normal(rng);
      y[i] = 3.0 * x(i, 5) + 0.01 * normal(rng);
    }
    GbrModel model = GbrModel::train(x, y, {});
    Vector imp = model.feature_importance();
    Index best = 0;
    imp.maxCoeff(&best);
    CHECK(best == 5);
    CHECK(imp.sum() == doctest::Approx(1.0).epsilon(1e-9));
    for (Index j = 0; j < 8; ++j) CHECK(imp[j] >= 0);
  }

  SUBCASE("zero-split model reports zeros with a flag") {
    Matrix x(6, 2);
    x.setRandom();
    Vector y = Vector::Constant(6, 1.0);
    GbrModel model = GbrModel::train(x, y, {});
    auto imp = gbr_feature_importance(model);
    CHECK(imp.no_splits);
    CHECK(imp.importances.isZero(0));
  }
}

TEST_CASE("importance is invariant under feature permutation") {
  // Generous leaf sizes keep every candidate split's gain distinct, so the
  // greedy choice cannot depend on column scan order.
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0, 1);
  Matrix x(200, 5);
  Vector y(200);
  for (Index i = 0; i < 200; ++i) {
    for (Index j = 0; j < 5; ++j) x(i, j) = normal(rng);
    y[i] = x(i, 0) + 2 * x(i, 2) - 0.5 * x(i, 4) + 0.1 * normal(rng);
  }
  GbrConfig cfg;
  cfg.n_trees = 20;
  cfg.max_depth = 2;
  cfg.min_samples_leaf = 10;
  GbrModel base = GbrModel::train(x, y, cfg);
  Vector imp = base.feature_importance();

  const std::array<Index, 5> perm = {3, 0, 4, 2, 1};
  Matrix xp(200, 5);
  for (Index j = 0; j < 5; ++j) xp.col(j) = x.col(perm[j]);
  GbrModel permuted = GbrModel::train(xp, y, cfg);
  Vector imp_p = permuted.feature_importance();
  for (Index j = 0; j < 5; ++j)
    CHECK(imp_p[j] == doctest::Approx(imp[perm[j]]).epsilon(1e-12));
}

TEST_CASE("training is deterministic and respects leaf sizes") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0, 1);
  Matrix x(60, 3);
  Vector y(60);
  for (Index i = 0; i < 60; ++i) {
    for (Index j = 0; j < 3; ++j) x(i, j) = normal(rng);
    y[i] = x(i, 0) * x(i, 1) + normal(rng);
  }
  GbrConfig cfg;
  cfg.min_samples_leaf = 4;
  GbrModel a = GbrModel::train(x, y, cfg);
  GbrModel b = GbrModel::train(x, y, cfg);
  CHECK(a.predict(x) == b.predict(x));

  for (const RegressionTree& tree : a.trees())
    for (const TreeNode& node : tree.nodes)
      if (node.feature < 0) CHECK(node.n_samples >= cfg.min_samples_leaf);
}

TEST_CASE("gbr input validation") {
  GbrConfig bad;
  bad.learning_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = {};
  bad.n_trees = 0;
  CHECK_THROWS_AS(bad.validate(), UsageError);

  Matrix x(3, 1);
  x << 1, 2, 3;
  Vector y(3);
  y << 1, 2, 3;
  CHECK_THROWS_AS(GbrModel::train(x, y, {}), DataError);  // needs 2*min_leaf rows

  Matrix x2(4, 1);
  x2 << 1, 2, 3, 4;
  Vector y2(4);
  y2 << 1, 2, 3, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(GbrModel::train(x2, y2, {}), DataError);
}
